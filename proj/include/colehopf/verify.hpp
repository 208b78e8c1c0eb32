#ifndef COLEHOPF_VERIFY_HPP
#define COLEHOPF_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "colehopf/coeff.hpp"
#include "colehopf/errors.hpp"
#include "colehopf/ode.hpp"
#include "colehopf/pairing.hpp"

namespace colehopf {

/// One sample of the mapped solution. psi fields are NaN when masked.
struct PsiSample {
  double x = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  double psi = 0.0;
  double dpsi = 0.0;
  double d2psi = 0.0;
  bool masked = false;
};

struct MappedSolution {
  std::vector<PsiSample> samples;
  double length = 0.0;    // trajectory span L
  double eps_pole = 0.0;  // relative masking threshold
  std::size_t masked = 0;
};

struct VerifyOptions {
  double eps_pole = 1e-2;       // mask |phi| < eps_pole * sqrt(phi^2 + (L phi')^2)
  std::size_t samples = 401;    // uniform sample count over the trajectory span
};

namespace detail {

// phi'' and phi''' from the linear equation at x.
struct PhiJet {
  double phi, dphi, d2phi, d3phi;
};

inline PhiJet phi_jet(const LinearODE& lin, double x, double phi, double dphi) {
  const Jet u = lin.U.eval(x);
  const Jet k = lin.K.eval(x);
  if (!std::isfinite(u.d1) || !std::isfinite(k.d1)) {
    throw std::invalid_argument("map_solution: U' and K' must be available");
  }
  const double d2 = (u.v + lin.lambda) * phi + k.v * dphi;
  const double d3 = u.d1 * phi + (u.v + lin.lambda + k.d1) * dphi + k.v * d2;
  return {phi, dphi, d2, d3};
}

}  // namespace detail

/// Maps a trajectory of the linear equation through psi = P + Q phi'/phi at
/// `opts.samples` uniform points. phi and phi' between nodes come from quintic
/// Hermite interpolation using phi'' and phi''' from the equation; psi' and
/// psi'' use the exact chain rule. A sample is masked as a pole when
/// |phi| < eps_pole * sqrt(phi^2 + (L phi')^2) with L the span, which masks
/// |x - x0| < eps_pole * L around a simple zero x0 and is invariant under
/// scaling and growth of phi. Throws NumericError if every sample is masked.
[[nodiscard]] inline MappedSolution map_solution(const Trajectory& traj, const LinearODE& lin, const Transform& t,
                                                 const VerifyOptions& opts = {}) {
  if (traj.dim != 2) throw std::invalid_argument("map_solution: expected a (phi, phi') trajectory");
  if (traj.size() < 2) throw std::invalid_argument("map_solution: trajectory has fewer than 2 nodes");
  if (opts.samples < 2) throw std::invalid_argument("map_solution: need at least 2 samples");
  if (!(opts.eps_pole >= 0.0)) throw std::invalid_argument("map_solution: eps_pole must be non-negative");

  MappedSolution out;
  out.eps_pole = opts.eps_pole;
  std::vector<detail::PhiJet> node;
  node.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    node.push_back(detail::phi_jet(lin, traj.x[i], traj.state(i, 0), traj.state(i, 1)));
  }
  const double lo = traj.lo(), hi = traj.hi();
  out.length = hi - lo;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::size_t seg = 1;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    const double x = s + 1 == opts.samples ? hi : lo + (hi - lo) * static_cast<double>(s) / (opts.samples - 1);
    while (seg + 1 < traj.size() && traj.x[seg] < x) ++seg;
    const auto& n0 = node[seg - 1];
    const auto& n1 = node[seg];
    const double x0 = traj.x[seg - 1], x1 = traj.x[seg];
    const double phi = detail::hermite(x0, x1, n0.phi, n0.dphi, n0.d2phi, n1.phi, n1.dphi, n1.d2phi, true, x).v;
    const double dphi = detail::hermite(x0, x1, n0.dphi, n0.d2phi, n0.d3phi, n1.dphi, n1.d2phi, n1.d3phi, true, x).v;

    PsiSample p{x, phi, dphi, nan, nan, nan, false};
    if (!(std::abs(phi) >= opts.eps_pole * std::hypot(phi, out.length * dphi)) || phi == 0.0) {
      p.masked = true;
      ++out.masked;
      out.samples.push_back(p);
      continue;
    }
    const detail::PhiJet j = detail::phi_jet(lin, x, phi, dphi);
    const Jet P = t.P.eval(x);
    const Jet Q = t.Q.eval(x);
    if (!std::isfinite(P.d2) || !std::isfinite(Q.d2)) {
      throw std::invalid_argument("map_solution: P'' and Q'' must be available");
    }
    const double r = dphi / phi;
    const double r1 = j.d2phi / phi - r * r;
    const double r2 = j.d3phi / phi - r * (j.d2phi / phi) - 2.0 * r * r1;
    p.psi = P.v + Q.v * r;
    p.dpsi = P.d1 + Q.d1 * r + Q.v * r1;
    p.d2psi = P.d2 + Q.d2 * r + 2.0 * Q.d1 * r1 + Q.v * r2;
    out.samples.push_back(p);
  }
  if (out.masked == out.samples.size()) throw NumericError("map_solution: every sample is masked (|phi| too small)");
  return out;
}

struct VerificationReport {
  std::vector<PsiSample> samples;
  std::vector<double> residuals;  // NaN at masked samples
  double max_residual = 0.0;
  double rms_residual = 0.0;
  std::size_t masked_count = 0;
  double masked_fraction = 0.0;
  std::string mask_reason;
  double tol = 0.0;
  double eps_pole = 0.0;
  double atol = 0.0;
  double rtol = 0.0;
  bool inconclusive = false;  // more than half the samples masked
  bool passed = false;
};

/// Residual psi'' - S - V psi - W psi^2 - R psi^3 - lambda psi - V1 psi' at the
/// unmasked samples. Passes iff the maximum is <= tol and the run is not
/// inconclusive.
[[nodiscard]] inline VerificationReport residual(const NonlinearODE& nl, const MappedSolution& m, double tol) {
  VerificationReport rep;
  rep.samples = m.samples;
  rep.tol = tol;
  rep.eps_pole = m.eps_pole;
  rep.masked_count = m.masked;
  rep.mask_reason = "|phi| < " + detail::format_number(m.eps_pole) + " * sqrt(phi^2 + (L phi')^2)";
  double sum_sq = 0.0;
  std::size_t used = 0;
  for (const auto& s : m.samples) {
    if (s.masked) {
      rep.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double x = s.x;
    const double psi = s.psi;
    double rhs = nl.S.value(x) + psi * (nl.V.value(x) + nl.lambda + psi * (nl.W.value(x) + psi * nl.R.value(x)));
    if (nl.V1) rhs += nl.V1->value(x) * s.dpsi;
    const double r = s.d2psi - rhs;
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, std::abs(r));
    if (!std::isfinite(r)) rep.max_residual = std::numeric_limits<double>::infinity();
    sum_sq += r * r;
    ++used;
  }
  if (!m.samples.empty()) rep.masked_fraction = static_cast<double>(m.masked) / static_cast<double>(m.samples.size());
  rep.rms_residual = used ? std::sqrt(sum_sq / static_cast<double>(used)) : 0.0;
  rep.inconclusive = rep.masked_fraction > 0.5;
  rep.passed = used > 0 && rep.max_residual <= tol && !rep.inconclusive;
  return rep;
}

/// Integrates the linear equation, maps the trajectory and evaluates the
/// nonlinear residual.
[[nodiscard]] inline VerificationReport verify_pair(const LinearODE& lin, const Transform& t, const NonlinearODE& nl,
                                                    const IVP& ivp, double tol, const VerifyOptions& opts = {}) {
  const Trajectory traj = solve_linear2(lin, ivp);
  VerificationReport rep = residual(nl, map_solution(traj, lin, t, opts), tol);
  rep.atol = ivp.atol;
  rep.rtol = ivp.rtol;
  return rep;
}

/// CSV with header x,phi,dphi,psi,dpsi,residual,masked; 17 significant digits.
inline void write_csv(const VerificationReport& rep, std::ostream& out) {
  out << "x,phi,dphi,psi,dpsi,residual,masked\n";
  char buf[64];
  auto num = [&](double v) {
    if (std::isnan(v)) return std::string("nan");
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    out << num(s.x) << ',' << num(s.phi) << ',' << num(s.dphi) << ',' << num(s.psi) << ',' << num(s.dpsi) << ','
        << num(rep.residuals[i]) << ',' << (s.masked ? 1 : 0) << '\n';
  }
}

}  // namespace colehopf

#endif  // COLEHOPF_VERIFY_HPP
