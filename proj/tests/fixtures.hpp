#ifndef ENLARGE_TESTS_FIXTURES_HPP_
#define ENLARGE_TESTS_FIXTURES_HPP_

// The two-atom fixtures, built by hand so unit tests do not depend on the
// JSON loader. tests/data/w1.json and w2.json carry the same models.

#include <ostream>
#include <string>
#include <vector>

#include "enlarge/process.hpp"
#include "enlarge/rational.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

// Readable gtest failure output.
inline void PrintTo(const ProcessPath& x, std::ostream* os) {
  for (Time t = 0; t <= x.horizon(); ++t) {
    *os << (t ? " | " : "[");
    for (std::size_t a = 0; a < x.atom_count(); ++a) *os << (a ? " " : "") << x.at(t, a).get_str();
  }
  *os << "]";
}

inline void PrintTo(const StoppingMap& s, std::ostream* os) {
  *os << "(";
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (a) *os << ", ";
    if (s.is_finite(a))
      *os << s[a];
    else
      *os << "inf";
  }
  *os << ")";
}

}  // namespace enlarge

namespace fixtures {

using enlarge::FinSpace;
using enlarge::Measurability;
using enlarge::Partition;
using enlarge::ProcessPath;
using enlarge::Rational;
using enlarge::StoppingMap;

inline Rational q(const char* s) { return enlarge::parse_rational(s); }

/// Omega = {w1, w2}, P = 1/2 each, F_0 = F_1 trivial, F_2 discrete.
inline FinSpace w1_space() {
  return FinSpace({"w1", "w2"}, {q("1/2"), q("1/2")},
                  {Partition::trivial(2), Partition::trivial(2), Partition::discrete(2)});
}

/// tau = 1 on w1, 2 on w2.
inline StoppingMap w1_tau() { return StoppingMap({1, 2}); }

/// Omega = {w1, w2}, P = 1/2 each, F_0 trivial, F_1 discrete, J = (a, b).
inline FinSpace w2_space() {
  return FinSpace({"w1", "w2"}, {q("1/2"), q("1/2")}, {Partition::trivial(2), Partition::discrete(2)},
                  Partition::discrete(2));
}

/// Rows are times; each row lists the value per atom.
inline ProcessPath path(std::vector<std::vector<long>> rows, Measurability tag = Measurability::adapted) {
  std::vector<std::vector<Rational>> v;
  for (const auto& r : rows) {
    std::vector<Rational> row;
    for (long x : r) row.emplace_back(x);
    v.push_back(std::move(row));
  }
  return ProcessPath(tag, std::move(v));
}

inline ProcessPath qpath(std::vector<std::vector<const char*>> rows, Measurability tag = Measurability::adapted) {
  std::vector<std::vector<Rational>> v;
  for (const auto& r : rows) {
    std::vector<Rational> row;
    for (const char* x : r) row.push_back(q(x));
    v.push_back(std::move(row));
  }
  return ProcessPath(tag, std::move(v));
}

inline std::string data_file(const std::string& name) { return std::string(ENLARGE_TEST_DATA) + "/" + name; }

}  // namespace fixtures

#endif  // ENLARGE_TESTS_FIXTURES_HPP_
