#ifndef COLEHOPF_PAIRING_HPP
#define COLEHOPF_PAIRING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "colehopf/calculus.hpp"
#include "colehopf/coeff.hpp"
#include "colehopf/ode.hpp"

namespace colehopf {

/// psi = P + Q phi'/phi.
struct Transform {
  CoeffFn P;
  CoeffFn Q;
};

/// psi'' = S + V psi + W psi^2 + R psi^3 + lambda psi (+ V1 psi' in damped form).
struct NonlinearODE {
  CoeffFn S;
  CoeffFn V;
  CoeffFn W;
  CoeffFn R;
  std::optional<CoeffFn> V1;
  double lambda = 0.0;
};

namespace formulas {

// Pointwise data of the transform and the linear equation: values and the
// derivatives the pairing conditions need.
template <class T>
struct PairingData {
  T P, P1, P2;
  T Q, Q1, Q2;
  T K, K1;
  T U, U1;
};

template <class T>
struct NonlinearCoeffs {
  T S, V, W, R;
};

/// Coefficients of the nonlinear equation forced by requiring the phi^-3 ..
/// phi^0 terms of the substituted equation to vanish.
template <class T>
NonlinearCoeffs<T> synthesize(const PairingData<T>& d, double lambda) {
  const T q2 = d.Q * d.Q;
  NonlinearCoeffs<T> c;
  c.R = 2.0 / q2;
  c.W = -(2.0 * (d.Q1 + 3.0 * d.P) + 3.0 * d.K * d.Q) / q2;
  c.V = (d.Q * d.Q2 + 4.0 * d.P * d.Q1 + 6.0 * d.P * d.P - q2 * (2.0 * d.U + 3.0 * lambda)) / q2 + d.K * d.K +
        (6.0 * d.P + 2.0 * d.Q1) * d.K / d.Q + d.K1;
  const T ul = d.U + lambda;
  c.S = 2.0 * ul * d.Q1 + d.Q * d.U1 + d.P2 - c.W * d.P * d.P - c.V * d.P - c.R * d.P * d.P * d.P -
        lambda * d.P + d.K * d.Q * ul;
  return c;
}

/// Right-hand side of the intrinsic condition on (V, W) for a Q = 1, K = 0 pairing.
template <class T>
T theorem_source(const T& V, const T& V1, const T& W, const T& W1, const T& W2, double lambda) {
  return 0.5 * (-V1 + (-W2 + (V + W1 + lambda) * W) / 3.0 - W * W * W / 27.0);
}

}  // namespace formulas

namespace detail {

inline void require_nonvanishing_q(const CoeffFn& Q) {
  if (!Q.is_symbolic()) return;
  const Expr& q = Q.expr();
  if (q.is_const(0.0)) throw std::invalid_argument("Q vanishes identically");
  if (depends_on_x(q)) {
    // Q = 0 at every evaluable sample counts as identically zero.
    bool any = false;
    for (double x : chebyshev_points(0.1, 2.1, 16)) {
      try {
        if (evaluate(q, x) != 0.0) return;
        any = true;
      } catch (const EvalError&) {
      }
    }
    if (any) throw std::invalid_argument("Q vanishes at every sample");
  }
}

// True when f is zero at, or changes sign between, the endpoints and Chebyshev
// samples of [lo, hi].
inline bool vanishes_on(const CoeffFn& f, double lo, double hi) {
  std::vector<double> xs{lo};
  for (double x : chebyshev_points(lo, hi, 64)) xs.push_back(x);
  xs.push_back(hi);
  double prev = 0.0;
  for (double x : xs) {
    const double v = f.value(x);
    if (v == 0.0 || (prev != 0.0 && (v > 0.0) != (prev > 0.0))) return true;
    prev = v;
  }
  return false;
}

struct PairingInputs {
  CoeffFn P, P1, P2, Q, Q1, Q2, K, K1, U, U1;

  PairingInputs(const CoeffFn& p, const CoeffFn& q, const CoeffFn& k, const CoeffFn& u)
      : P(p), P1(p.derivative()), P2(P1.derivative()), Q(q), Q1(q.derivative()), Q2(Q1.derivative()), K(k),
        K1(k.derivative()), U(u), U1(u.derivative()) {}

  [[nodiscard]] formulas::PairingData<Jet> at(double x) const {
    return {P.eval(x), P1.eval(x), P2.eval(x), Q.eval(x), Q1.eval(x), Q2.eval(x),
            K.eval(x), K1.eval(x), U.eval(x), U1.eval(x)};
  }
};

}  // namespace detail

/// Nonlinear partner of (P, Q, K, U, lambda): R = 2/Q^2,
/// W = -(2(Q' + 3P) + 3KQ)/Q^2, V from the phi^-1 condition and S solved from
/// the phi^0 condition. Symbolic inputs give symbolic outputs.
[[nodiscard]] inline NonlinearODE synth_nonlinear(const CoeffFn& P, const CoeffFn& Q, const CoeffFn& K,
                                                  const CoeffFn& U, double lambda) {
  detail::require_nonvanishing_q(Q);
  NonlinearODE out;
  out.lambda = lambda;
  if (P.is_symbolic() && Q.is_symbolic() && K.is_symbolic() && U.is_symbolic()) {
    const Expr p = P.expr(), q = Q.expr(), k = K.expr(), u = U.expr();
    const Expr p1 = differentiate(p), q1 = differentiate(q), k1 = differentiate(k);
    const formulas::PairingData<Expr> d{p, p1, differentiate(p1), q, q1, differentiate(q1),
                                        k, k1, u, differentiate(u)};
    const auto c = formulas::synthesize(d, lambda);
    out.S = CoeffFn::symbolic(c.S);
    out.V = CoeffFn::symbolic(c.V);
    out.W = CoeffFn::symbolic(c.W);
    out.R = CoeffFn::symbolic(c.R);
    return out;
  }
  const detail::PairingInputs in(P, Q, K, U);
  auto component = [in, lambda](auto pick, const char* label) {
    return CoeffFn::computed([in, lambda, pick](double x) { return pick(formulas::synthesize(in.at(x), lambda)); },
                             label);
  };
  out.S = component([](const auto& c) { return c.S; }, "S(synth)");
  out.V = component([](const auto& c) { return c.V; }, "V(synth)");
  out.W = component([](const auto& c) { return c.W; }, "W(synth)");
  out.R = component([](const auto& c) { return c.R; }, "R(synth)");
  return out;
}

/// Solves the first-order linear equation for U that makes the pairing
/// reproduce the given S: Q U' + (2Q' + 2P + KQ) U + [S_synth(U=0) - S] = 0.
[[nodiscard]] inline CoeffFn solve_U(const CoeffFn& P, const CoeffFn& Q, const CoeffFn& K, const CoeffFn& S,
                                     double lambda, const IVP& ivp) {
  detail::require_nonvanishing_q(Q);
  if (detail::vanishes_on(Q, ivp.lo(), ivp.hi())) throw NumericError("solve_U: Q vanishes on the interval");
  const CoeffFn P1 = P.derivative(), Q1 = Q.derivative(), K1 = K.derivative();
  const CoeffFn P2 = P1.derivative(), Q2 = Q1.derivative();
  const CoeffFn coeff = combine(
      "solve_U coefficient", [](const auto& p, const auto& q, const auto& q1, const auto& k) {
        return (2.0 * q1 + 2.0 * p + k * q) / q;
      },
      P, Q, Q1, K);
  const CoeffFn forcing = combine(
      "solve_U forcing",
      [lambda](const auto& p, const auto& p1, const auto& p2, const auto& q, const auto& q1, const auto& q2,
               const auto& k, const auto& k1, const auto& s) {
        using T = std::decay_t<decltype(p)>;
        const formulas::PairingData<T> d{p, p1, p2, q, q1, q2, k, k1, T(0.0), T(0.0)};
        return (formulas::synthesize(d, lambda).S - s) / q;
      },
      P, P1, P2, Q, Q1, Q2, K, K1, S);
  return solve_linear1(coeff, forcing, ivp);
}

/// K = y'/y where y'' + (3P - lambda/P) y' + (S/P) y = 0, the linearized form
/// of the Riccati half of the first decomposition. The grid stores K, K' and K''.
[[nodiscard]] inline CoeffFn solve_K_split(const CoeffFn& P, const CoeffFn& S, double lambda, const IVP& ivp) {
  if (detail::vanishes_on(P, ivp.lo(), ivp.hi())) throw NumericError("solve_K_split: P vanishes on the interval");
  const CoeffFn Uy = combine("-S/P", [](const auto& s, const auto& p) { return -s / p; }, S, P);
  const CoeffFn Ky = combine(
      "-(3P - lambda/P)", [lambda](const auto& p) { return -(3.0 * p - lambda / p); }, P);
  const Trajectory t = solve_linear2(Uy, Ky, 0.0, ivp);

  double scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) scale = std::max(scale, std::abs(t.state(i, 0)));
  GridData g;
  g.x = t.x;
  bool second = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.x[i];
    const double y = t.state(i, 0), y1 = t.state(i, 1), y2 = t.deriv(i, 1);
    if (std::abs(y) <= 1e-12 * scale || (i > 0 && (y > 0.0) != (t.state(i - 1, 0) > 0.0))) {
      throw NumericError("solve_K_split: y vanishes near x=" + detail::format_number(x) + " (pole of K)");
    }
    const double k = y1 / y;
    const double k1 = y2 / y - k * k;
    g.f.push_back(k);
    g.df.push_back(k1);
    if (second) {
      const Jet uy = Uy.eval(x), ky = Ky.eval(x);
      const double y3 = uy.d1 * y + uy.v * y1 + ky.d1 * y1 + ky.v * y2;
      const double k2 = y3 / y - k * (y2 / y) - 2.0 * k * k1;
      if (std::isfinite(k2)) {
        g.d2f.push_back(k2);
      } else {
        second = false;
        g.d2f.clear();
      }
    }
  }
  return CoeffFn::grid(std::move(g));
}

struct AnsatzSolution {
  CoeffFn P;
  CoeffFn S;
};

/// With S = -3P^2 K - 2P^3 the pairing condition is linear in P:
/// P'' + (2U + 2lambda - K' - K^2) P + K(U + lambda) + U' = 0.
/// Returns P on the integrator's nodes and S assembled there.
[[nodiscard]] inline AnsatzSolution solve_P_ansatz(const CoeffFn& U, const CoeffFn& K, double lambda,
                                                   const IVP& ivp) {
  const CoeffFn U1 = U.derivative(), K1 = K.derivative();
  const CoeffFn minus_a = combine(
      "-(2U+2lambda-K'-K^2)",
      [lambda](const auto& u, const auto& k, const auto& k1) { return -(2.0 * u + 2.0 * lambda - k1 - k * k); }, U,
      K, K1);
  const CoeffFn minus_g = combine(
      "-(K(U+lambda)+U')", [lambda](const auto& u, const auto& k, const auto& u1) { return -(k * (u + lambda) + u1); },
      U, K, U1);
  const Trajectory t = solve_linear2_forced(minus_a, CoeffFn::constant(0.0), 0.0, minus_g, ivp);
  const CoeffFn P = grid_from_second_order(t);

  GridData s;
  s.x = t.x;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Jet p{t.state(i, 0), t.state(i, 1), t.deriv(i, 1)};
    const Jet k = K.eval(t.x[i]);
    const Jet v = -3.0 * p * p * k - 2.0 * p * p * p;
    s.f.push_back(v.v);
    s.df.push_back(v.d1);
    s.d2f.push_back(v.d2);
  }
  if (std::any_of(s.d2f.begin(), s.d2f.end(), [](double v) { return !std::isfinite(v); })) s.d2f.clear();
  return {P, CoeffFn::grid(std::move(s))};
}

namespace detail {

// Antiderivative for sums of polynomial terms and c/x^k; nullopt otherwise.
inline std::optional<Expr> antiderivative(const Expr& e) {
  if (!depends_on_x(e)) return e * Expr::var();
  switch (e.op()) {
    case Op::Var: return pow(Expr::var(), 2.0) / 2.0;
    case Op::Neg: {
      auto a = antiderivative(e.arg());
      return a ? std::optional<Expr>(-*a) : std::nullopt;
    }
    case Op::Add:
    case Op::Sub: {
      auto a = antiderivative(e.lhs());
      auto b = antiderivative(e.rhs());
      if (!a || !b) return std::nullopt;
      return Expr::binary(e.op(), *a, *b);
    }
    case Op::Mul: {
      if (!depends_on_x(e.lhs())) {
        auto b = antiderivative(e.rhs());
        return b ? std::optional<Expr>(e.lhs() * *b) : std::nullopt;
      }
      if (!depends_on_x(e.rhs())) {
        auto a = antiderivative(e.lhs());
        return a ? std::optional<Expr>(*a * e.rhs()) : std::nullopt;
      }
      return std::nullopt;
    }
    case Op::Div: {
      if (!depends_on_x(e.rhs())) {
        auto a = antiderivative(e.lhs());
        return a ? std::optional<Expr>(*a / e.rhs()) : std::nullopt;
      }
      if (!depends_on_x(e.lhs())) {
        // c / x^k
        const Expr& den = e.rhs();
        if (den.op() == Op::Var) return e.lhs() * ln(Expr::var());
        if (den.op() == Op::Pow && den.lhs().op() == Op::Var && !depends_on_x(den.rhs())) {
          const Expr k = den.rhs();
          if (simplify(k).is_const(1.0)) return e.lhs() * ln(Expr::var());
          return e.lhs() * pow(Expr::var(), 1.0 - k) / (1.0 - k);
        }
      }
      return std::nullopt;
    }
    case Op::Pow: {
      if (e.lhs().op() == Op::Var && !depends_on_x(e.rhs())) {
        const Expr k = simplify(e.rhs());
        const auto kv = numeric_value(k);
        if (kv && *kv == -1.0) return ln(Expr::var());
        return pow(Expr::var(), k + 1.0) / (k + 1.0);
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

// exp(q), collapsing exp(c*ln(x)) to x^c.
inline Expr exp_of(const Expr& q) {
  auto is_ln_x = [](const Expr& e) { return e.op() == Op::Call && e.fn() == Fn::Ln && e.arg().op() == Op::Var; };
  if (is_ln_x(q)) return Expr::var();
  if (q.op() == Op::Neg && is_ln_x(q.arg())) return simplify(1.0 / Expr::var());
  if (q.op() == Op::Mul && !depends_on_x(q.lhs()) && is_ln_x(q.rhs())) return simplify(pow(Expr::var(), q.lhs()));
  return exp(q);
}

}  // namespace detail

struct DampedNormalization {
  CoeffFn p;
  NonlinearODE normalized;
};

/// Removes the V1 psi' term: with V1 = -2p'/p and xi = p psi the equation
/// becomes xi'' = pS + (V + p''/p) xi + (W/p) xi^2 + (R/p^2) xi^3 + lambda xi.
/// p = exp(-1/2 int V1) is symbolic when V1 has a polynomial or c/x^k
/// antiderivative; otherwise it is integrated numerically on [lo, hi]
/// (p = 1 at lo), which then must be supplied.
[[nodiscard]] inline DampedNormalization normalize_damped(const NonlinearODE& nl,
                                                          std::optional<std::pair<double, double>> interval = {}) {
  DampedNormalization out;
  if (!nl.V1) {
    out.p = CoeffFn::constant(1.0);
    out.normalized = nl;
    return out;
  }
  const CoeffFn& V1 = *nl.V1;
  std::optional<Expr> q;
  if (V1.is_symbolic()) {
    if (auto integral = detail::antiderivative(V1.expr())) q = simplify(-0.5 * *integral);
  }
  if (q) {
    out.p = CoeffFn::symbolic(detail::exp_of(*q));
  } else {
    if (!interval) throw std::invalid_argument("normalize_damped: V1 needs an interval for numeric quadrature");
    IVP ivp;
    ivp.a = interval->first;
    ivp.b = interval->second;
    ivp.y0 = {0.0};
    const CoeffFn half = combine("V1/2", [](const auto& v) { return 0.5 * v; }, V1);
    const CoeffFn qg = solve_linear1(CoeffFn::constant(0.0), half, ivp);
    out.p = CoeffFn::computed([qg](double x) { return exp(qg.eval(x)); }, "exp(-1/2 int V1)");
  }
  const CoeffFn p2 = out.p.derivative().derivative();
  NonlinearODE& n = out.normalized;
  n.lambda = nl.lambda;
  n.S = combine("p*S", [](const auto& p, const auto& s) { return p * s; }, out.p, nl.S);
  n.V = combine("V+p''/p", [](const auto& v, const auto& p, const auto& pp) { return v + pp / p; }, nl.V, out.p,
                p2);
  n.W = combine("W/p", [](const auto& w, const auto& p) { return w / p; }, nl.W, out.p);
  n.R = combine("R/p^2", [](const auto& r, const auto& p) { return r / (p * p); }, nl.R, out.p);
  return out;
}

/// Outcome of the intrinsic Q = 1 pairing test.
struct TheoremCertificate {
  bool satisfied = false;
  std::vector<double> x;      // Chebyshev samples
  std::vector<double> delta;  // S - source(V, W) at the samples
  double max_delta = 0.0;
  double max_S = 0.0;
  double tol = 0.0;
  std::string note;
  // Present when satisfied: P = -W/6, U = -V/2 + W^2/12 - 3 lambda/2, K = 0.
  std::optional<CoeffFn> P;
  std::optional<CoeffFn> U;
  std::optional<CoeffFn> K;
};

/// Samples Delta = S - 1/2{-V' + 1/3[-W'' + (V + W' + lambda) W] - W^3/27} at n
/// Chebyshev points of [lo, hi]; satisfied iff max|Delta| <= tol (1 + max|S|).
/// When R is given it must equal 2 at the samples.
[[nodiscard]] inline TheoremCertificate theorem_check(const CoeffFn& S, const CoeffFn& V, const CoeffFn& W,
                                                      double lambda, double lo, double hi, std::size_t n = 64,
                                                      double tol = 1e-8,
                                                      const std::optional<CoeffFn>& R = std::nullopt) {
  if (!(lo < hi)) throw std::invalid_argument("theorem_check: need lo < hi");
  if (n < 2) throw std::invalid_argument("theorem_check: need at least 2 samples");
  TheoremCertificate cert;
  cert.tol = tol;
  cert.x = chebyshev_points(lo, hi, n);
  bool r_ok = true;
  for (double x : cert.x) {
    const double s = S.value(x);
    const Jet v = V.eval(x);
    const Jet w = W.eval(x);
    if (!std::isfinite(v.d1) || !std::isfinite(w.d1) || !std::isfinite(w.d2)) {
      throw std::invalid_argument("theorem_check: V' and W'' must be available");
    }
    const double d = s - formulas::theorem_source(v.v, v.d1, w.v, w.d1, w.d2, lambda);
    cert.delta.push_back(d);
    cert.max_delta = std::max(cert.max_delta, std::abs(d));
    cert.max_S = std::max(cert.max_S, std::abs(s));
    if (R && std::abs(R->value(x) - 2.0) > tol) r_ok = false;
  }
  cert.satisfied = r_ok && cert.max_delta <= tol * (1.0 + cert.max_S);
  if (!r_ok) cert.note = "R differs from 2";
  if (cert.satisfied) {
    cert.P = combine("-W/6", [](const auto& w) { return -w / 6.0; }, W);
    cert.U = combine(
        "-V/2+W^2/12-3lambda/2", [lambda](const auto& v, const auto& w) { return -v / 2.0 + w * w / 12.0 - 1.5 * lambda; },
        V, W);
    cert.K = CoeffFn::constant(0.0);
  }
  return cert;
}

}  // namespace colehopf

#endif  // COLEHOPF_PAIRING_HPP
