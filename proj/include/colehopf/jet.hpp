#ifndef COLEHOPF_JET_HPP
#define COLEHOPF_JET_HPP

#include <cmath>
#include <limits>

namespace colehopf {

/// Value of a function of x together with its first two derivatives.
///
/// Arithmetic propagates derivatives by the product/quotient rules. A
/// derivative that is not available is NaN and stays NaN through arithmetic,
/// so consumers can tell "not known" from "zero".
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

  /// Jet of f' given the jet of f; the second derivative of f' is unknown.
  [[nodiscard]] Jet shifted() const { return {d1, d2, std::numeric_limits<double>::quiet_NaN()}; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet operator/(const Jet& a, const Jet& b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

[[nodiscard]] inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}

}  // namespace colehopf

#endif  // COLEHOPF_JET_HPP
