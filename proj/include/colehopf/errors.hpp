#ifndef COLEHOPF_ERRORS_HPP
#define COLEHOPF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace colehopf {

/// Malformed expression text. `offset()` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation failure: unbound parameter, ln/sqrt domain, division by zero,
/// or a grid queried outside its span.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator failure: step-size underflow (a singularity in the coefficients),
/// a vanishing solution where its logarithmic derivative is needed, and similar.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace colehopf

#endif  // COLEHOPF_ERRORS_HPP
