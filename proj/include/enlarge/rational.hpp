#ifndef ENLARGE_RATIONAL_HPP_
#define ENLARGE_RATIONAL_HPP_

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace enlarge {

/// Exact rational scalar used by every non-Monte-Carlo module.
using Rational = mpq_class;

namespace detail {

inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace detail

/// Parses "num/den" or "num". Throws std::invalid_argument on anything else,
/// including a zero denominator.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den) ||
      den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("not a rational literal: \"" + std::string(text) + "\"");
  mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0)
    throw std::invalid_argument("zero denominator: \"" + std::string(text) + "\"");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// Always "num/den", integers included ("3/1").
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace enlarge

#endif  // ENLARGE_RATIONAL_HPP_
