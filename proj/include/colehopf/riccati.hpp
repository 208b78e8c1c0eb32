#ifndef COLEHOPF_RICCATI_HPP
#define COLEHOPF_RICCATI_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colehopf/calculus.hpp"
#include "colehopf/coeff.hpp"
#include "colehopf/ode.hpp"

namespace colehopf {

/// psi' + A psi^2 + B psi + C1 = 0.
struct RiccatiSpec {
  CoeffFn A;
  CoeffFn B;
  CoeffFn C1;
};

/// lead phi'' + first phi' + zeroth phi = 0.
struct SecondOrderLinear {
  CoeffFn lead;
  CoeffFn first;
  CoeffFn zeroth;
};

/// Linear equation reached from the Riccati equation by psi = phi'/(A phi):
/// A phi'' + (B A - A') phi' + C1 A^2 phi = 0.
[[nodiscard]] inline SecondOrderLinear riccati_linearize(const RiccatiSpec& spec) {
  if (spec.A.is_symbolic() && spec.A.expr().is_const(0.0)) {
    throw std::invalid_argument("riccati_linearize: A vanishes identically");
  }
  const CoeffFn dA = spec.A.derivative();
  SecondOrderLinear out;
  out.lead = spec.A;
  out.first = combine("B*A-A'", [](const auto& b, const auto& a, const auto& da) { return b * a - da; }, spec.B,
                      spec.A, dA);
  out.zeroth = combine("C1*A^2", [](const auto& c, const auto& a) { return c * (a * a); }, spec.C1, spec.A);
  return out;
}

struct RiccatiCheck {
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Integrates the linearized equation and measures |psi' + A psi^2 + B psi + C1|
/// at the trajectory nodes for psi = phi'/(A phi), with psi' from the exact
/// chain rule. Throws NumericError when phi or the leading coefficient vanishes.
[[nodiscard]] inline RiccatiCheck riccati_residual(const RiccatiSpec& spec, const IVP& ivp) {
  const SecondOrderLinear lin = riccati_linearize(spec);
  auto second = [&](double x, double phi, double dphi) {
    const double lead = lin.lead.value(x);
    if (lead == 0.0) throw NumericError("leading coefficient vanishes at x=" + detail::format_number(x));
    return -(lin.first.value(x) * dphi + lin.zeroth.value(x) * phi) / lead;
  };
  auto rhs = [&](double x, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = second(x, y[0], y[1]);
  };
  const Trajectory t = integrate_system(rhs, ivp);
  RiccatiCheck out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.x[i];
    const double phi = t.state(i, 0);
    const double dphi = t.state(i, 1);
    if (phi == 0.0) throw NumericError("phi vanishes at x=" + detail::format_number(x));
    const double d2phi = t.deriv(i, 1);
    const Jet a = spec.A.eval(x);
    const double psi = dphi / (a.v * phi);
    const double dpsi = d2phi / (a.v * phi) - dphi * (a.d1 * phi + a.v * dphi) / ((a.v * phi) * (a.v * phi));
    const double r = dpsi + a.v * psi * psi + spec.B.value(x) * psi + spec.C1.value(x);
    out.max_residual = std::max(out.max_residual, std::abs(r));
    ++out.points;
  }
  return out;
}

/// Expanded T^n psi as an expression in x and the reserved parameters
/// psi0 .. psi<order> standing for psi, psi', ..., psi^(order).
struct NonlinearForm {
  Expr lhs;
  int order = 0;
};

[[nodiscard]] inline std::string psi_name(int k) { return "psi" + std::to_string(k); }

/// Applies T = d/dx + A psi + B once: total derivative plus (A psi0 + B) F.
[[nodiscard]] inline NonlinearForm apply_t(const NonlinearForm& f, const Expr& A, const Expr& B) {
  Expr total = differentiate(f.lhs);
  for (int k = 0; k <= f.order; ++k) {
    const std::string name = psi_name(k);
    if (!depends_on(f.lhs, name)) continue;
    total = total + Expr::param(psi_name(k + 1)) * differentiate(f.lhs, name);
  }
  return {simplify(total + (A * Expr::param(psi_name(0)) + B) * f.lhs), f.order + 1};
}

/// Symbolic expansion of T^n psi with T = d/dx + A(x) psi + B(x).
/// A and B must be symbolic; 1 <= n <= 6.
[[nodiscard]] inline NonlinearForm tn_expand(int n, const CoeffFn& A, const CoeffFn& B) {
  if (n < 1 || n > 6) throw std::invalid_argument("tn_expand: n must be in 1..6");
  if (!A.is_symbolic() || !B.is_symbolic()) throw std::invalid_argument("tn_expand: A and B must be symbolic");
  NonlinearForm f{Expr::param(psi_name(0)), 0};
  for (int i = 0; i < n; ++i) f = apply_t(f, A.expr(), B.expr());
  return f;
}

/// Evaluates a NonlinearForm at x with psi-derivative values psi[0..order].
[[nodiscard]] inline double evaluate(const NonlinearForm& f, double x, std::span<const double> psi) {
  if (psi.size() < static_cast<std::size_t>(f.order) + 1) throw std::invalid_argument("too few psi derivatives");
  Bindings b{x, {}};
  for (int k = 0; k <= f.order; ++k) b.params[psi_name(k)] = psi[static_cast<std::size_t>(k)];
  return evaluate(f.lhs, b);
}

/// Solution of phi^(n+1) = Q phi, the linear equation paired with T^n psi = Q
/// when A = 1 and B = 0. Keeps Q so phi^(n+1) is exact at every node.
struct TnSolution {
  int n = 0;
  CoeffFn Q;
  Trajectory traj;  // state (phi, phi', ..., phi^(n))
};

[[nodiscard]] inline TnSolution solve_tn_linear(int n, const CoeffFn& Q, const IVP& ivp) {
  if (n < 1) throw std::invalid_argument("solve_tn_linear: n must be >= 1");
  if (ivp.y0.size() != static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("solve_tn_linear: need phi, ..., phi^(n) initial data");
  }
  auto rhs = [&](double x, std::span<const double> y, std::span<double> dy) {
    for (int k = 0; k < n; ++k) dy[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k) + 1];
    dy[static_cast<std::size_t>(n)] = Q.value(x) * y[0];
  };
  return {n, Q, integrate_system(rhs, ivp)};
}

/// psi, psi', ..., psi^(m) of psi = phi'/phi from phi, ..., phi^(m+1), via
/// phi^(k+1) = sum_i C(k,i) psi^(i) phi^(k-i).
[[nodiscard]] inline std::vector<double> log_derivative_jet(std::span<const double> phi) {
  const std::size_t m = phi.size() - 1;
  std::vector<double> psi(m);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = phi[k + 1];
    double binom = 1.0;  // C(k, i)
    for (std::size_t i = 0; i < k; ++i) {
      acc -= binom * psi[i] * phi[k - i];
      binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    psi[k] = acc / phi[0];
  }
  return psi;
}

struct TnCheck {
  bool passed = false;
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Checks T^n psi = Q along phi for psi = phi'/phi (A = 1, B = 0). phi^(n+1)
/// comes from the equation that generated the trajectory, so a Q different
/// from the generating one shows up as a residual.
[[nodiscard]] inline TnCheck tn_substitution_check(int n, const CoeffFn& Q, const TnSolution& sol, double tol) {
  if (n != sol.n) throw std::invalid_argument("tn_substitution_check: order mismatch with the trajectory");
  const NonlinearForm form = tn_expand(n, CoeffFn::constant(1.0), CoeffFn::constant(0.0));
  const Trajectory& t = sol.traj;
  const auto un = static_cast<std::size_t>(n);
  double phi_scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) phi_scale = std::max(phi_scale, std::abs(t.state(i, 0)));

  TnCheck out;
  std::vector<double> phi(un + 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.x[i];
    for (std::size_t k = 0; k <= un; ++k) phi[k] = t.state(i, k);
    if (std::abs(phi[0]) <= 1e-12 * phi_scale) {
      throw NumericError("phi vanishes at x=" + detail::format_number(x));
    }
    phi[un + 1] = sol.Q.value(x) * phi[0];
    const std::vector<double> psi = log_derivative_jet(phi);
    const double r = evaluate(form, x, psi) - Q.value(x);
    out.max_residual = std::max(out.max_residual, std::abs(r));
    ++out.points;
  }
  out.passed = out.max_residual <= tol;
  return out;
}

}  // namespace colehopf

#endif  // COLEHOPF_RICCATI_HPP
