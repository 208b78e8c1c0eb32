#ifndef COLEHOPF_CALCULUS_HPP
#define COLEHOPF_CALCULUS_HPP

#include <cmath>
#include <optional>
#include <string>

#include "colehopf/errors.hpp"
#include "colehopf/eval.hpp"
#include "colehopf/expr.hpp"

namespace colehopf {

namespace detail {

// Value of a closed numeric subtree (Const, Neg(Const), pi), if it is one.
inline std::optional<double> numeric_value(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Pi: return std::numbers::pi;
    case Op::Neg:
      if (e.arg().op() == Op::Const || e.arg().op() == Op::Pi) return -*numeric_value(e.arg());
      return std::nullopt;
    default: return std::nullopt;
  }
}

inline bool is_numeric(const Expr& e, double v) {
  const auto n = numeric_value(e);
  return n && *n == v;
}

// Folds a node whose operands are all numeric. Leaves it alone when the
// result would be an evaluation error or non-finite.
inline std::optional<Expr> try_fold(const Expr& e) {
  try {
    const double v = evaluate(e, Bindings{});
    if (std::isfinite(v)) return Expr::constant(v);
  } catch (const EvalError&) {
  }
  return std::nullopt;
}

inline Expr simplify_neg(const Expr& a);
inline Expr simplify_binary(Op op, const Expr& a, const Expr& b);

// If e carries a leading sign (-a, (-c)*b, (-a)/b, ...), returns -e without it.
inline std::optional<Expr> strip_sign(const Expr& e) {
  switch (e.op()) {
    case Op::Neg: return e.arg();
    case Op::Const: return e.value() < 0.0 ? std::optional<Expr>(Expr::constant(-e.value())) : std::nullopt;
    case Op::Mul:
    case Op::Div:
      if (auto a = strip_sign(e.lhs())) return simplify_binary(e.op(), *a, e.rhs());
      if (auto b = strip_sign(e.rhs())) return simplify_binary(e.op(), e.lhs(), *b);
      return std::nullopt;
    default: return std::nullopt;
  }
}

inline Expr simplify_neg(const Expr& a) {
  if (const auto v = numeric_value(a)) {
    if (a.op() != Op::Pi) return Expr::constant(-*v);
  }
  if (auto s = strip_sign(a)) return *s;
  if (a.op() == Op::Sub) return simplify_binary(Op::Sub, a.rhs(), a.lhs());
  return Expr::neg(a);
}

inline Expr simplify_binary(Op op, const Expr& a, const Expr& b) {
  const auto na = numeric_value(a);
  const auto nb = numeric_value(b);
  const Expr raw = Expr::binary(op, a, b);
  if (na && nb) {
    if (auto folded = try_fold(raw)) return *folded;
  }
  switch (op) {
    case Op::Add:
      if (is_numeric(a, 0.0)) return b;
      if (is_numeric(b, 0.0)) return a;
      if (auto sb = strip_sign(b)) return simplify_binary(Op::Sub, a, *sb);
      if (a.op() == Op::Neg) return simplify_binary(Op::Sub, b, a.arg());
      return raw;
    case Op::Sub:
      if (is_numeric(b, 0.0)) return a;
      if (is_numeric(a, 0.0)) return simplify_neg(b);
      if (auto sb = strip_sign(b)) return simplify_binary(Op::Add, a, *sb);
      if (a == b) return Expr::constant(0.0);
      return raw;
    case Op::Mul:
      if (is_numeric(a, 0.0) || is_numeric(b, 0.0)) return Expr::constant(0.0);
      if (is_numeric(a, 1.0)) return b;
      if (is_numeric(b, 1.0)) return a;
      if (is_numeric(a, -1.0)) return simplify_neg(b);
      if (is_numeric(b, -1.0)) return simplify_neg(a);
      if (auto sa = strip_sign(a)) {
        if (auto sb = strip_sign(b)) return simplify_binary(Op::Mul, *sa, *sb);
      }
      if (nb && !na) return simplify_binary(Op::Mul, b, a);
      if (na && b.op() == Op::Mul && numeric_value(b.lhs())) {
        return simplify_binary(Op::Mul, simplify_binary(Op::Mul, a, b.lhs()), b.rhs());
      }
      if (na && a.op() != Op::Pi && b.op() == Op::Neg) {
        return simplify_binary(Op::Mul, Expr::constant(-*na), b.arg());
      }
      return raw;
    case Op::Div:
      if (is_numeric(a, 0.0)) return Expr::constant(0.0);
      if (is_numeric(b, 1.0)) return a;
      if (is_numeric(b, -1.0)) return simplify_neg(a);
      if (a == b) return Expr::constant(1.0);
      if (auto sa = strip_sign(a)) {
        if (auto sb = strip_sign(b)) return simplify_binary(Op::Div, *sa, *sb);
      }
      return raw;
    case Op::Pow:
      if (is_numeric(b, 1.0)) return a;
      if (is_numeric(b, 0.0) || is_numeric(a, 1.0)) return Expr::constant(1.0);
      if (is_numeric(a, 0.0) && nb && *nb > 0.0) return Expr::constant(0.0);
      return raw;
    default: return raw;
  }
}

inline Expr differentiate_wrt(const Expr& e, const std::optional<std::string>& param);

inline Expr differentiate_wrt(const Expr& e, const std::optional<std::string>& param) {
  auto d = [&](const Expr& sub) { return differentiate_wrt(sub, param); };
  auto independent = [&](const Expr& sub) { return param ? !depends_on(sub, *param) : !depends_on_x(sub); };
  switch (e.op()) {
    case Op::Const:
    case Op::Pi: return Expr::constant(0.0);
    case Op::Var: return Expr::constant(param ? 0.0 : 1.0);
    case Op::Param: return Expr::constant(param && e.name() == *param ? 1.0 : 0.0);
    case Op::Neg: return -d(e.arg());
    case Op::Add: return d(e.lhs()) + d(e.rhs());
    case Op::Sub: return d(e.lhs()) - d(e.rhs());
    case Op::Mul: return d(e.lhs()) * e.rhs() + e.lhs() * d(e.rhs());
    case Op::Div: return (d(e.lhs()) * e.rhs() - e.lhs() * d(e.rhs())) / pow(e.rhs(), 2.0);
    case Op::Pow: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      if (independent(v)) return v * pow(u, v - 1.0) * d(u);
      if (independent(u)) return e * ln(u) * d(v);
      return e * (d(v) * ln(u) + v * d(u) / u);
    }
    case Op::Call: {
      const Expr& u = e.arg();
      const Expr du = d(u);
      switch (e.fn()) {
        case Fn::Exp: return e * du;
        case Fn::Ln: return du / u;
        case Fn::Sin: return cos(u) * du;
        case Fn::Cos: return -(sin(u) * du);
        case Fn::Sinh: return cosh(u) * du;
        case Fn::Cosh: return sinh(u) * du;
        case Fn::Sqrt: return du / (2.0 * e);
      }
    }
  }
  return Expr::constant(0.0);
}

}  // namespace detail

/// Constant folding, neutral-element removal (e+0, e*1, e^1, 0*e, e/1) and
/// sign normalization. No expansion or term collection. The result evaluates
/// identically to the input wherever both are defined.
[[nodiscard]] inline Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Pi:
    case Op::Var:
    case Op::Param: return e;
    case Op::Neg: return detail::simplify_neg(simplify(e.arg()));
    case Op::Call: {
      Expr call = Expr::call(e.fn(), simplify(e.arg()));
      if (detail::numeric_value(call.arg())) {
        if (auto folded = detail::try_fold(call)) return *folded;
      }
      return call;
    }
    default: return detail::simplify_binary(e.op(), simplify(e.lhs()), simplify(e.rhs()));
  }
}

/// Exact symbolic derivative with respect to x (Params are constants), simplified.
[[nodiscard]] inline Expr differentiate(const Expr& e) { return simplify(detail::differentiate_wrt(e, std::nullopt)); }

/// Partial derivative with respect to the parameter `name` (x held fixed), simplified.
[[nodiscard]] inline Expr differentiate(const Expr& e, const std::string& name) {
  return simplify(detail::differentiate_wrt(e, name));
}

}  // namespace colehopf

#endif  // COLEHOPF_CALCULUS_HPP
