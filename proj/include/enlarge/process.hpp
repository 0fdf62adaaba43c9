#ifndef ENLARGE_PROCESS_HPP_
#define ENLARGE_PROCESS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "enlarge/error.hpp"
#include "enlarge/rational.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

enum class Measurability { adapted, predictable, ambient };

inline const char* to_string(Measurability m) {
  switch (m) {
    case Measurability::adapted: return "adapted";
    case Measurability::predictable: return "predictable";
    case Measurability::ambient: return "ambient";
  }
  return "?";
}

/// Rational process on {0, ..., T} x atoms, stored time-major. The tag is a
/// claim; `is_adapted` / `is_predictable` check it against a filtration.
class ProcessPath {
 public:
  ProcessPath() = default;

  ProcessPath(Measurability tag, std::vector<std::vector<Rational>> values)
      : tag_(tag), values_(std::move(values)) {
    if (values_.empty()) throw InputError("process has no time steps");
    for (const auto& row : values_)
      if (row.size() != values_.front().size())
        throw InputError("process rows differ in atom count");
  }

  static ProcessPath constant(Measurability tag, Time horizon, std::size_t atoms,
                              const Rational& value) {
    return ProcessPath(tag, std::vector<std::vector<Rational>>(
                                horizon + 1, std::vector<Rational>(atoms, value)));
  }

  template <class F>
  static ProcessPath generate(Measurability tag, Time horizon, std::size_t atoms, F&& f) {
    std::vector<std::vector<Rational>> v(horizon + 1, std::vector<Rational>(atoms));
    for (Time t = 0; t <= horizon; ++t)
      for (std::size_t a = 0; a < atoms; ++a) v[t][a] = f(t, a);
    return ProcessPath(tag, std::move(v));
  }

  Measurability tag() const noexcept { return tag_; }
  Time horizon() const noexcept { return values_.size() - 1; }
  std::size_t atom_count() const noexcept { return values_.front().size(); }

  const Rational& at(Time t, std::size_t atom) const { return values_.at(t).at(atom); }
  Rational& at(Time t, std::size_t atom) { return values_.at(t).at(atom); }
  const std::vector<Rational>& row(Time t) const { return values_.at(t); }
  const std::vector<std::vector<Rational>>& values() const noexcept { return values_; }

  ProcessPath with_tag(Measurability tag) const {
    ProcessPath p = *this;
    p.tag_ = tag;
    return p;
  }

  /// Increment X_t - X_{t-1}, with X_{0-} = X_0 (so the time-0 increment is 0).
  Rational increment(Time t, std::size_t atom) const {
    return t == 0 ? Rational(0) : Rational(at(t, atom) - at(t - 1, atom));
  }

  friend bool operator==(const ProcessPath& a, const ProcessPath& b) {
    return a.values_ == b.values_;
  }

 private:
  Measurability tag_ = Measurability::adapted;
  std::vector<std::vector<Rational>> values_;
};

/// A named price process.
struct Asset {
  std::string name;
  ProcessPath path;
};

namespace detail {

inline void require_same_shape(const ProcessPath& a, const ProcessPath& b) {
  if (a.horizon() != b.horizon() || a.atom_count() != b.atom_count())
    throw InputError("processes have different shapes");
}

inline Measurability combined_tag(const ProcessPath& a, const ProcessPath& b) {
  if (a.tag() == b.tag()) return a.tag();
  if (a.tag() == Measurability::ambient || b.tag() == Measurability::ambient)
    return Measurability::ambient;
  return Measurability::adapted;
}

template <class Op>
ProcessPath pointwise(const ProcessPath& a, const ProcessPath& b, Op op) {
  require_same_shape(a, b);
  return ProcessPath::generate(combined_tag(a, b), a.horizon(), a.atom_count(),
                               [&](Time t, std::size_t i) { return Rational(op(a.at(t, i), b.at(t, i))); });
}

}  // namespace detail

inline ProcessPath operator+(const ProcessPath& a, const ProcessPath& b) {
  return detail::pointwise(a, b, std::plus<>{});
}
inline ProcessPath operator-(const ProcessPath& a, const ProcessPath& b) {
  return detail::pointwise(a, b, std::minus<>{});
}
inline ProcessPath operator*(const ProcessPath& a, const ProcessPath& b) {
  return detail::pointwise(a, b, std::multiplies<>{});
}

inline bool is_adapted(const ProcessPath& x, const FinSpace& space) {
  if (x.horizon() != space.horizon() || x.atom_count() != space.atom_count()) return false;
  for (Time t = 0; t <= x.horizon(); ++t)
    if (!space.partition(t).is_measurable<Rational>(x.row(t))) return false;
  return true;
}

/// Value at t constant on (t-1)-cells; value at 0 constant on the whole space.
inline bool is_predictable(const ProcessPath& x, const FinSpace& space) {
  if (x.horizon() != space.horizon() || x.atom_count() != space.atom_count()) return false;
  if (!Partition::trivial(space.atom_count()).is_measurable<Rational>(x.row(0))) return false;
  for (Time t = 1; t <= x.horizon(); ++t)
    if (!space.partition(t - 1).is_measurable<Rational>(x.row(t))) return false;
  return true;
}

inline bool is_ambient_measurable(const ProcessPath& x, const FinSpace& space) {
  if (x.horizon() != space.horizon() || x.atom_count() != space.atom_count()) return false;
  for (Time t = 0; t <= x.horizon(); ++t)
    if (!space.ambient().is_measurable<Rational>(x.row(t))) return false;
  return true;
}

inline void require_adapted(const ProcessPath& x, const FinSpace& space, const std::string& what) {
  if (!is_adapted(x, space)) throw InputError(what + " is not adapted to the filtration");
}

inline bool is_nonnegative(const ProcessPath& x) {
  for (const auto& row : x.values())
    for (const auto& v : row)
      if (sgn(v) < 0) return false;
  return true;
}

inline bool is_nondecreasing(const ProcessPath& x) {
  for (Time t = 1; t <= x.horizon(); ++t)
    for (std::size_t a = 0; a < x.atom_count(); ++a)
      if (x.at(t, a) < x.at(t - 1, a)) return false;
  return true;
}

}  // namespace enlarge

#endif  // ENLARGE_PROCESS_HPP_
