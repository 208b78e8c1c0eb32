#ifndef COLEHOPF_EVAL_HPP
#define COLEHOPF_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "colehopf/errors.hpp"
#include "colehopf/expr.hpp"

namespace colehopf {

using ParamMap = std::map<std::string, double, std::less<>>;

struct Bindings {
  double x = 0.0;
  ParamMap params;
};

namespace detail {

inline double checked_pow(double base, double exponent) {
  if (exponent == std::nearbyint(exponent)) {
    if (base == 0.0 && exponent < 0.0) throw EvalError("division by zero in 0^" + format_number(exponent));
    return std::pow(base, exponent);
  }
  // Non-integer exponent: exp(exponent * ln(base)), defined for base > 0 only.
  if (!(base > 0.0)) {
    throw EvalError("non-integer power of non-positive base " + format_number(base));
  }
  return std::exp(exponent * std::log(base));
}

inline double apply(Fn fn, double a) {
  switch (fn) {
    case Fn::Exp: return std::exp(a);
    case Fn::Ln:
      if (!(a > 0.0)) throw EvalError("ln of non-positive argument " + format_number(a));
      return std::log(a);
    case Fn::Sin: return std::sin(a);
    case Fn::Cos: return std::cos(a);
    case Fn::Sinh: return std::sinh(a);
    case Fn::Cosh: return std::cosh(a);
    case Fn::Sqrt:
      if (a < 0.0) throw EvalError("sqrt of negative argument " + format_number(a));
      return std::sqrt(a);
  }
  return 0.0;
}

}  // namespace detail

/// IEEE double evaluation. Throws EvalError on an unbound parameter, an ln/sqrt
/// domain violation or division by zero.
[[nodiscard]] inline double evaluate(const Expr& e, const Bindings& b) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Pi: return std::numbers::pi;
    case Op::Var: return b.x;
    case Op::Param: {
      const auto it = b.params.find(e.name());
      if (it == b.params.end()) throw EvalError("unbound parameter '" + e.name() + "'");
      return it->second;
    }
    case Op::Neg: return -evaluate(e.arg(), b);
    case Op::Call: return detail::apply(e.fn(), evaluate(e.arg(), b));
    case Op::Add: return evaluate(e.lhs(), b) + evaluate(e.rhs(), b);
    case Op::Sub: return evaluate(e.lhs(), b) - evaluate(e.rhs(), b);
    case Op::Mul: return evaluate(e.lhs(), b) * evaluate(e.rhs(), b);
    case Op::Div: {
      const double num = evaluate(e.lhs(), b);
      const double den = evaluate(e.rhs(), b);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Op::Pow: return detail::checked_pow(evaluate(e.lhs(), b), evaluate(e.rhs(), b));
  }
  return 0.0;
}

[[nodiscard]] inline double evaluate(const Expr& e, double x) { return evaluate(e, Bindings{x, {}}); }

/// True when `e` contains the independent variable.
[[nodiscard]] inline bool depends_on_x(const Expr& e) {
  switch (e.op()) {
    case Op::Var: return true;
    case Op::Const:
    case Op::Pi:
    case Op::Param: return false;
    case Op::Neg:
    case Op::Call: return depends_on_x(e.arg());
    default: return depends_on_x(e.lhs()) || depends_on_x(e.rhs());
  }
}

/// True when `e` contains the parameter `name`.
[[nodiscard]] inline bool depends_on(const Expr& e, const std::string& name) {
  switch (e.op()) {
    case Op::Param: return e.name() == name;
    case Op::Const:
    case Op::Pi:
    case Op::Var: return false;
    case Op::Neg:
    case Op::Call: return depends_on(e.arg(), name);
    default: return depends_on(e.lhs(), name) || depends_on(e.rhs(), name);
  }
}

inline void collect_params(const Expr& e, std::vector<std::string>& out) {
  switch (e.op()) {
    case Op::Param:
      if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
      return;
    case Op::Const:
    case Op::Pi:
    case Op::Var: return;
    case Op::Neg:
    case Op::Call: collect_params(e.arg(), out); return;
    default:
      collect_params(e.lhs(), out);
      collect_params(e.rhs(), out);
  }
}

/// Replaces every bound Param by its value; unbound Params are left in place.
[[nodiscard]] inline Expr substitute(const Expr& e, const ParamMap& values) {
  switch (e.op()) {
    case Op::Param: {
      const auto it = values.find(e.name());
      return it == values.end() ? e : Expr::constant(it->second);
    }
    case Op::Const:
    case Op::Pi:
    case Op::Var: return e;
    case Op::Neg: return Expr::neg(substitute(e.arg(), values));
    case Op::Call: return Expr::call(e.fn(), substitute(e.arg(), values));
    default: return Expr::binary(e.op(), substitute(e.lhs(), values), substitute(e.rhs(), values));
  }
}

/// Replaces the Param `name` by the expression `by`.
[[nodiscard]] inline Expr substitute(const Expr& e, const std::string& name, const Expr& by) {
  switch (e.op()) {
    case Op::Param: return e.name() == name ? by : e;
    case Op::Const:
    case Op::Pi:
    case Op::Var: return e;
    case Op::Neg: return Expr::neg(substitute(e.arg(), name, by));
    case Op::Call: return Expr::call(e.fn(), substitute(e.arg(), name, by));
    default: return Expr::binary(e.op(), substitute(e.lhs(), name, by), substitute(e.rhs(), name, by));
  }
}

/// Chebyshev points of the first kind on [lo, hi], ascending.
[[nodiscard]] inline std::vector<double> chebyshev_points(double lo, double hi, std::size_t n) {
  std::vector<double> pts(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (2.0 * static_cast<double>(n - 1 - k) + 1.0) / (2.0 * static_cast<double>(n));
    pts[k] = mid + half * std::cos(theta);
  }
  return pts;
}

/// Numeric expression equality: |a-b| <= reltol*(1+max(|a|,|b|)) at n Chebyshev
/// points of [lo, hi]. Evaluation failures propagate as EvalError naming the point.
[[nodiscard]] inline bool equivalent(const Expr& a, const Expr& b, double lo, double hi, std::size_t n,
                                     double reltol, const ParamMap& params = {}) {
  if (!(lo < hi)) throw std::invalid_argument("equivalent: need lo < hi");
  if (n < 2) throw std::invalid_argument("equivalent: need at least 2 sample points");
  Bindings bind{0.0, params};
  for (double x : chebyshev_points(lo, hi, n)) {
    bind.x = x;
    double va = 0.0;
    double vb = 0.0;
    try {
      va = evaluate(a, bind);
      vb = evaluate(b, bind);
    } catch (const EvalError& err) {
      throw EvalError(std::string(err.what()) + " (sample x=" + detail::format_number(x) + ")");
    }
    if (!(std::abs(va - vb) <= reltol * (1.0 + std::max(std::abs(va), std::abs(vb))))) return false;
  }
  return true;
}

}  // namespace colehopf

#endif  // COLEHOPF_EVAL_HPP
