#ifndef ENLARGE_ERROR_HPP_
#define ENLARGE_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace enlarge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition on the caller's data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Where a hypothesis failed: time, the atoms of the offending cell, and the
/// signal label when the check is per label.
struct Witness {
  std::size_t time = 0;
  std::vector<std::size_t> atoms;
  std::optional<std::string> label;
};

/// A theorem hypothesis does not hold on the given data (jump at eta,
/// predictable jump to certainty, ...). Carries the witnessing location.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& what, Witness witness)
      : Error(what), witness_(std::move(witness)) {}

  const Witness& witness() const noexcept { return witness_; }

 private:
  Witness witness_;
};

}  // namespace enlarge

#endif  // ENLARGE_ERROR_HPP_
