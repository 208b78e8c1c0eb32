#ifndef COLEHOPF_CATALOG_HPP
#define COLEHOPF_CATALOG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "colehopf/coeff.hpp"
#include "colehopf/ode.hpp"
#include "colehopf/pairing.hpp"
#include "colehopf/parse.hpp"

namespace colehopf {

struct CaseIVP {
  std::string label;
  double phi = 0.0;
  double dphi = 0.0;
};

/// A complete pairing: linear equation, transform and the synthesized
/// nonlinear equation, with a recommended interval and initial data.
struct PairingProblem {
  std::string name;
  ParamMap params;
  LinearODE lin;
  Transform transform;
  NonlinearODE nl;
  double a = 0.0;
  double b = 1.0;
  std::vector<CaseIVP> ivps;  // initial data at x = a
  std::string notes;

  [[nodiscard]] IVP ivp(std::size_t i = 0, double atol = 1e-10, double rtol = 1e-10) const {
    IVP out;
    out.a = a;
    out.b = b;
    out.y0 = {ivps.at(i).phi, ivps.at(i).dphi};
    out.atol = atol;
    out.rtol = rtol;
    return out;
  }
};

struct CaseInfo {
  std::string name;
  ParamMap defaults;
  std::string summary;
};

namespace detail {

// Polynomial with ascending coefficients.
using Poly = std::vector<double>;

inline double poly_value(const Poly& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Poly poly_derivative(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

inline Expr poly_expr(const Poly& p) {
  Expr acc = Expr::constant(0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    const Expr term = k == 0 ? Expr::constant(p[k]) : Expr::constant(p[k]) * pow(Expr::var(), static_cast<double>(k));
    acc = acc + term;
  }
  return simplify(acc);
}

// Physicists' Hermite polynomial: H0 = 1, H1 = 2x, H_{k+1} = 2x H_k - 2k H_{k-1}.
inline Poly hermite_poly(int n) {
  Poly prev{1.0};
  if (n == 0) return prev;
  Poly cur{0.0, 2.0};
  for (int k = 1; k < n; ++k) {
    Poly next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Legendre functions of the first and second kind with derivatives, |x| < 1.
struct LegendrePair {
  double p, dp, q, dq;
};

inline LegendrePair legendre_pq(int n, double x) {
  double p0 = 1.0, p1 = x;
  double q0 = std::atanh(x), q1 = x * std::atanh(x) - 1.0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    const double q2 = ((2.0 * k + 1.0) * x * q1 - k * q0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
    q0 = q1;
    q1 = q2;
  }
  const double den = x * x - 1.0;
  return {p1, n * (x * p1 - p0) / den, q1, n * (x * q1 - q0) / den};
}

class CaseParams {
 public:
  CaseParams(std::string_view case_name, const ParamMap& defaults, const ParamMap& given)
      : name_(case_name), values_(defaults) {
    for (const auto& [k, v] : given) {
      if (!defaults.contains(k)) {
        throw std::invalid_argument("case '" + name_ + "' has no parameter '" + k + "'");
      }
      if (!std::isfinite(v)) throw std::invalid_argument("parameter '" + k + "' must be finite");
      values_[k] = v;
    }
  }

  [[nodiscard]] double real(const std::string& key) const { return values_.at(key); }

  [[nodiscard]] int integer(const std::string& key, int min) const {
    const double v = values_.at(key);
    if (v != std::round(v) || v < min || v > 64) {
      throw std::invalid_argument("parameter '" + key + "' of case '" + name_ + "' must be an integer in [" +
                                  std::to_string(min) + ", 64]");
    }
    return static_cast<int>(v);
  }

  [[nodiscard]] const ParamMap& values() const { return values_; }

 private:
  std::string name_;
  ParamMap values_;
};

inline IVP ivp_at(double a, double b, double v0, double v1) {
  IVP ivp;
  ivp.a = a;
  ivp.b = b;
  ivp.y0 = {v0, v1};
  return ivp;
}

inline IVP ivp1_at(double a, double b, double v0) {
  IVP ivp;
  ivp.a = a;
  ivp.b = b;
  ivp.y0 = {v0};
  return ivp;
}

inline CoeffFn sym(std::string_view text, const ParamMap& params = {}) {
  return CoeffFn::symbolic(parse(text), params);
}

// Fills in the nonlinear equation from the linear data and the transform.
inline PairingProblem finish(PairingProblem p) {
  p.nl = synth_nonlinear(p.transform.P, p.transform.Q, p.lin.K, p.lin.U, p.lin.lambda);
  return p;
}

inline PairingProblem base(std::string name, const CaseParams& cp, double a, double b) {
  PairingProblem p;
  p.name = std::move(name);
  p.params = cp.values();
  p.a = a;
  p.b = b;
  p.transform.Q = CoeffFn::constant(1.0);
  p.lin.K = CoeffFn::constant(0.0);
  return p;
}

inline double nonzero(const CaseParams& cp, const std::string& key) {
  const double v = cp.real(key);
  if (v == 0.0) throw std::invalid_argument("parameter '" + key + "' must be nonzero");
  return v;
}

inline PairingProblem case_harmonic(const ParamMap& given) {
  const CaseParams cp("harmonic", {{"omega", 1.0}}, given);
  const double w = std::abs(nonzero(cp, "omega"));
  auto p = base("harmonic", cp, 0.2 / w, 1.4 / w);
  p.lin.U = CoeffFn::constant(-w * w);
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 2.0, 0.0)).P;
  const double c = std::cos(w * p.a), s = std::sin(w * p.a);
  p.ivps = {{"cos(omega x) + sin(omega x)", c + s, w * (c - s)},
            {"cos(omega x)", c, -w * s},
            {"sin(omega x)", s, w * c}};
  p.notes = "P'' = 2 omega^2 P from P(a) = 2, P'(a) = 0; S = -2 P^3";
  return finish(std::move(p));
}

inline PairingProblem case_trig(const ParamMap& given) {
  const CaseParams cp("trig", {{"omega", 1.0}}, given);
  const double w = std::abs(nonzero(cp, "omega"));
  auto p = base("trig", cp, 0.2 / w, 1.4 / w);
  p.lin.U = CoeffFn::constant(w * w);
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 2.0, 0.0)).P;
  const double c = std::cosh(w * p.a), s = std::sinh(w * p.a);
  p.ivps = {{"cosh(omega x) + sinh(omega x)/2", c + 0.5 * s, w * (s + 0.5 * c)},
            {"cosh(omega x)", c, w * s},
            {"sinh(omega x)", s, w * c}};
  p.notes = "phi'' = omega^2 phi; P'' = -2 omega^2 P from P(a) = 2, P'(a) = 0 is trigonometric; S = -2 P^3";
  return finish(std::move(p));
}

inline PairingProblem case_straightline(const ParamMap& given) {
  const CaseParams cp("straightline", {}, given);
  auto p = base("straightline", cp, 0.5, 2.0);
  p.lin.U = CoeffFn::constant(0.0);
  p.transform.P = sym("1 + x/2");
  p.ivps = {{"1 + x/2", 1.0 + p.a / 2.0, 0.5}, {"1", 1.0, 0.0}, {"x", p.a, 1.0}};
  p.notes = "U = K = 0 makes P linear; S = -2 P^3";
  return finish(std::move(p));
}

inline PairingProblem case_legendre(const ParamMap& given) {
  const CaseParams cp("legendre", {{"n", 2.0}}, given);
  const int n = cp.integer("n", 2);
  auto p = base("legendre", cp, -0.8, 0.8);
  const ParamMap nn{{"n", static_cast<double>(n)}};
  p.lin.U = sym("-n*(n+1)/(1-x^2)", nn);
  p.lin.K = sym("2*x/(1-x^2)", nn);
  p.transform.P = sym("-2*n*(n+1)*x/((n^2+n-2)*(1-x^2))", nn);
  const LegendrePair l = legendre_pq(n, p.a);
  p.ivps = {{"P_n + Q_n", l.p + l.q, l.dp + l.dq}, {"P_n", l.p, l.dp}, {"Q_n", l.q, l.dq}};
  p.notes = "closed-form rational P; n = 1 is excluded because its denominator vanishes";
  return finish(std::move(p));
}

inline PairingProblem case_bessel0(const ParamMap& given) {
  const CaseParams cp("bessel0", {}, given);
  auto p = base("bessel0", cp, 0.5, 5.0);
  p.lin.U = CoeffFn::constant(-1.0);
  p.lin.K = sym("-1/x");
  p.transform.P = sym("1/(2*x)");
  const double x = p.a;
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0},
            {"J0", std::cyl_bessel_j(0.0, x), -std::cyl_bessel_j(1.0, x)},
            {"Y0", std::cyl_neumann(0.0, x), -std::cyl_neumann(1.0, x)}};
  p.notes = "Bessel order 0 with the particular P = 1/(2x)";
  return finish(std::move(p));
}

inline PairingProblem case_hermite(const ParamMap& given) {
  const CaseParams cp("hermite", {{"n", 2.0}}, given);
  const int n = cp.integer("n", 0);
  if (n % 2 != 0) throw std::invalid_argument("hermite: n must be even");
  auto p = base("hermite", cp, 0.0, 1.0);
  p.lin.U = CoeffFn::constant(-2.0 * n);
  p.lin.K = sym("2*x");
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 0.0, 0.0)).P;
  const Poly h = hermite_poly(n);
  p.ivps = {{"H_n", poly_value(h, p.a), poly_value(poly_derivative(h), p.a)},
            {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0},
            {"odd solution", 0.0, 1.0}};
  p.notes = "P integrated from P(0) = P'(0) = 0; S = -3 P^2 K - 2 P^3";
  return finish(std::move(p));
}

inline PairingProblem case_laguerre(const ParamMap& given) {
  const CaseParams cp("laguerre", {{"n", 2.0}}, given);
  const int n = cp.integer("n", 1);
  auto p = base("laguerre", cp, 0.5, 3.0);
  const ParamMap nn{{"n", static_cast<double>(n)}};
  p.lin.U = sym("-n/x", nn);
  p.lin.K = sym("(x-1)/x");
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 1.0, 0.0)).P;
  const double x = p.a;
  const double l = std::laguerre(static_cast<unsigned>(n), x);
  const double dl = n * (l - std::laguerre(static_cast<unsigned>(n - 1), x)) / x;
  p.ivps = {{"L_n", l, dl}, {"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0}};
  p.notes = "P integrated from P(a) = 1, P'(a) = 0; S = -3 P^2 K - 2 P^3";
  return finish(std::move(p));
}

inline PairingProblem case_painleve2(const ParamMap& given) {
  const CaseParams cp("painleve2", {}, given);
  auto p = base("painleve2", cp, 0.0, 2.0);
  const CoeffFn S = CoeffFn::constant(-0.5), V = sym("x"), W = CoeffFn::constant(0.0);
  const TheoremCertificate cert = theorem_check(S, V, W, 0.0, p.a, p.b);
  if (!cert.satisfied) throw std::logic_error("painleve2: intrinsic condition not satisfied");
  p.lin.U = *cert.U;
  p.lin.K = *cert.K;
  p.transform.P = *cert.P;
  // Ai(-c x) and Bi(-c x) with c^3 = 1/2 solve phi'' = -x phi / 2.
  const double c = std::cbrt(0.5);
  const double ai0 = 1.0 / (std::cbrt(9.0) * std::tgamma(2.0 / 3.0));
  const double dai0 = -1.0 / (std::cbrt(3.0) * std::tgamma(1.0 / 3.0));
  const double bi0 = ai0 * std::sqrt(3.0);
  const double dbi0 = -dai0 * std::sqrt(3.0);
  p.ivps = {{"phi(0) = 1, phi'(0) = 0", 1.0, 0.0}, {"Ai(-c x)", ai0, -c * dai0}, {"Bi(-c x)", bi0, -c * dbi0}};
  p.notes = "psi'' = -1/2 + x psi + 2 psi^3; P, U, K from the intrinsic-condition certificate";
  return finish(std::move(p));
}

inline PairingProblem case_example1(const ParamMap& given) {
  const CaseParams cp("example1", {{"b", 1.0}}, given);
  const double b = cp.real("b");
  auto p = base("example1", cp, 1.0, 3.0);
  const ParamMap bb{{"b", b}};
  p.lin.U = sym("b*(b+1)/x^2", bb);
  p.transform.P = sym("b/x", bb);
  p.ivps = {{"x^(b+1) + x^(-b)", 2.0, 1.0}, {"x^(b+1)", 1.0, b + 1.0}, {"x^(-b)", 1.0, -b}};
  p.notes = "S = 0 and V = 2b(2b-1)/x^2 after synthesis";
  return finish(std::move(p));
}

inline PairingProblem case_example2(const ParamMap& given) {
  const CaseParams cp("example2", {{"n", 2.0}}, given);
  const int n = cp.integer("n", 0);
  if (n % 2 != 0) throw std::invalid_argument("example2: n must be even");
  const Poly h = hermite_poly(n);
  const Poly dh = poly_derivative(h);
  // K = H_n'/H_n has poles at the zeros of H_n; stop well before the first positive one.
  double right = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = i * 1e-3;
    if (poly_value(h, x) * poly_value(h, x + 1e-3) <= 0.0) {
      right = 0.8 * x;
      break;
    }
  }
  auto p = base("example2", cp, 0.05, right);
  const ParamMap nn{{"n", static_cast<double>(n)}};
  p.transform.P = sym("-2*x/3");
  const CoeffFn S = sym("-4*n*x/3", nn);
  p.lin.K = solve_K_split(p.transform.P, S, 0.0, ivp_at(p.a, p.b, poly_value(h, p.a), poly_value(dh, p.a)));
  const double u0 = 4.0 * p.a * p.a / 9.0 + 2.0 / 3.0;
  p.lin.U = solve_U(p.transform.P, p.transform.Q, p.lin.K, S, 0.0, ivp1_at(p.a, p.b, u0));
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0},
            {"phi(a) = 1, phi'(a) = -1", 1.0, -1.0}};
  p.notes = "K = H_n'/H_n from the split Riccati half; U integrated with U(a) = 4a^2/9 + 2/3";
  return finish(std::move(p));
}

inline PairingProblem case_example3(const ParamMap& given) {
  const CaseParams cp("example3", {{"a", 1.0}, {"b", 1.0}}, given);
  auto p = base("example3", cp, 0.0, 1.0);
  p.transform.P = sym("a + b*x", cp.values());
  const CoeffFn S = combine("-2P^3", [](const auto& q) { return -2.0 * q * q * q; }, p.transform.P);
  p.lin.U = solve_U(p.transform.P, p.transform.Q, p.lin.K, S, 0.0, ivp1_at(p.a, p.b, 1.0));
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1/2, phi'(a) = 1", 0.5, 1.0},
            {"phi(a) = 1, phi'(a) = -1/2", 1.0, -0.5}};
  p.notes = "S = -2 P^3, K = 0; U integrated from U(0) = 1";
  return finish(std::move(p));
}

inline PairingProblem case_example4(const ParamMap& given) {
  const CaseParams cp("example4", {{"a", 1.0}}, given);
  auto p = base("example4", cp, 1.0, 3.0);
  p.lin.U = sym("-a/x^2", cp.values());
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 1.0, 0.0)).P;
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0},
            {"phi(a) = 1, phi'(a) = -1/2", 1.0, -0.5}};
  p.notes = "S = -2 P^3, K = 0; P'' = 2a P/x^2 - 2a/x^3 integrated from P(1) = 1, P'(1) = 0";
  return finish(std::move(p));
}

inline PairingProblem case_example4_reversed(const ParamMap& given) {
  const CaseParams cp("example4_reversed", {{"a", 1.0}}, given);
  auto p = base("example4_reversed", cp, 1.0, 3.0);
  p.transform.P = sym("-a/x^2", cp.values());
  const CoeffFn S = combine("-2P^3", [](const auto& q) { return -2.0 * q * q * q; }, p.transform.P);
  p.lin.U = solve_U(p.transform.P, p.transform.Q, p.lin.K, S, 0.0, ivp1_at(p.a, p.b, 1.0));
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0},
            {"phi(a) = 1, phi'(a) = -1/2", 1.0, -0.5}};
  p.notes = "S = -2 P^3, K = 0; U = exp(2a - 2a/x) integrated from U(1) = 1";
  return finish(std::move(p));
}

inline PairingProblem case_example5(const ParamMap& given) {
  const CaseParams cp("example5", {{"a", 0.5}}, given);
  auto p = base("example5", cp, 0.0, 1.0);
  p.lin.U = sym("2*exp(2*a*x)", cp.values());
  p.transform.P = solve_P_ansatz(p.lin.U, p.lin.K, 0.0, ivp_at(p.a, p.b, 1.0, 0.0)).P;
  p.ivps = {{"phi(a) = 1, phi'(a) = 0", 1.0, 0.0}, {"phi(a) = 1, phi'(a) = 1", 1.0, 1.0},
            {"phi(a) = 1, phi'(a) = -1", 1.0, -1.0}};
  p.notes = "S = -2 P^3, K = 0; P = -a + (Bessel J0/Y0 in z = sqrt(2) exp(a x)/a), integrated numerically";
  return finish(std::move(p));
}

struct CaseEntry {
  CaseInfo info;
  PairingProblem (*build)(const ParamMap&);
};

inline const std::vector<CaseEntry>& registry() {
  static const std::vector<CaseEntry> entries = {
      {{"bessel0", {}, "Bessel order 0, P = 1/(2x)"}, case_bessel0},
      {{"example1", {{"b", 1.0}}, "P = b/x, U = b(b+1)/x^2"}, case_example1},
      {{"example2", {{"n", 2.0}}, "P = -2x/3, S = -4nx/3, K and U integrated"}, case_example2},
      {{"example3", {{"a", 1.0}, {"b", 1.0}}, "P = a + bx, S = -2P^3, U integrated"}, case_example3},
      {{"example4", {{"a", 1.0}}, "U = -a/x^2, P integrated"}, case_example4},
      {{"example4_reversed", {{"a", 1.0}}, "P = -a/x^2, U integrated"}, case_example4_reversed},
      {{"example5", {{"a", 0.5}}, "U = 2exp(2ax), P integrated"}, case_example5},
      {{"harmonic", {{"omega", 1.0}}, "U = -omega^2, P exponential"}, case_harmonic},
      {{"hermite", {{"n", 2.0}}, "Hermite equation, n even, P integrated"}, case_hermite},
      {{"laguerre", {{"n", 2.0}}, "Laguerre equation, P integrated"}, case_laguerre},
      {{"legendre", {{"n", 2.0}}, "Legendre equation, n >= 2, rational P"}, case_legendre},
      {{"painleve2", {}, "Painleve II with parameter -1/2 from Airy solutions"}, case_painleve2},
      {{"straightline", {}, "U = 0, linear P"}, case_straightline},
      {{"trig", {{"omega", 1.0}}, "U = omega^2, P trigonometric"}, case_trig},
  };
  return entries;
}

}  // namespace detail

/// Registered case descriptors, sorted by name.
[[nodiscard]] inline std::vector<CaseInfo> list_cases() {
  std::vector<CaseInfo> out;
  for (const auto& e : detail::registry()) out.push_back(e.info);
  return out;
}

/// Builds a registered case. Unknown names and invalid parameters throw
/// std::invalid_argument.
[[nodiscard]] inline PairingProblem build_case(std::string_view name, const ParamMap& params = {}) {
  for (const auto& e : detail::registry()) {
    if (e.info.name == name) return e.build(params);
  }
  throw std::invalid_argument("unknown case '" + std::string(name) + "'");
}

}  // namespace colehopf

#endif  // COLEHOPF_CATALOG_HPP
