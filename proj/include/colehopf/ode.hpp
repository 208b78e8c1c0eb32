#ifndef COLEHOPF_ODE_HPP
#define COLEHOPF_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colehopf/coeff.hpp"
#include "colehopf/errors.hpp"

namespace colehopf {

/// Initial value problem on the interval between `a` and `b`.
///
/// The initial state is given at `start` (defaults to `a`). A start strictly
/// inside the interval integrates both ways and joins the halves. The absolute
/// tolerance is measured in units of the initial state's max-norm, which makes
/// the step sequence invariant under scaling of a linear problem's initial data.
struct IVP {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> y0;
  double atol = 1e-10;
  double rtol = 1e-10;
  std::optional<double> start;

  [[nodiscard]] double initial_point() const { return start.value_or(a); }
  [[nodiscard]] double lo() const { return std::min(a, b); }
  [[nodiscard]] double hi() const { return std::max(a, b); }
};

/// Sampled solution of a first-order system. Nodes are ascending; `y` and
/// `dy` hold `dim` entries per node (state and its derivative).
struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> dy;
  double atol = 0.0;
  double rtol = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
  [[nodiscard]] double state(std::size_t i, std::size_t k) const { return y[i * dim + k]; }
  [[nodiscard]] double deriv(std::size_t i, std::size_t k) const { return dy[i * dim + k]; }
  [[nodiscard]] double lo() const { return x.front(); }
  [[nodiscard]] double hi() const { return x.back(); }

  /// Dense output: cubic Hermite on the stored (value, derivative) pairs.
  /// Returns the state and its derivative at xq.
  [[nodiscard]] std::pair<std::vector<double>, std::vector<double>> at(double xq) const {
    const double slack = 1e-12 * (std::abs(lo()) + std::abs(hi()) + (hi() - lo()));
    if (!(xq >= lo() - slack && xq <= hi() + slack)) {
      throw EvalError("trajectory queried at x=" + detail::format_number(xq) + " outside its span");
    }
    xq = std::clamp(xq, lo(), hi());
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, size() - 1);
    std::vector<double> value(dim);
    std::vector<double> slope(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const Jet j = detail::hermite(x[i - 1], x[i], state(i - 1, k), deriv(i - 1, k), 0.0, state(i, k),
                                    deriv(i, k), 0.0, false, xq);
      value[k] = j.v;
      slope[k] = j.d1;
    }
    return {value, slope};
  }
};

/// Right-hand side dy/dx = f(x, y).
using OdeRhs = std::function<void(double x, std::span<const double> y, std::span<double> dydx)>;

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct Sweep {
  std::vector<double> x, y, dy;
  std::size_t accepted = 0, rejected = 0;
};

// One directed sweep from x0 to x1 with PI step control.
inline Sweep sweep(const OdeRhs& f, double x0, double x1, std::span<const double> y0, double atol, double rtol,
                   double span_len) {
  using T = Dopri5;
  const std::size_t n = y0.size();
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double hmax = std::abs(x1 - x0);
  const double hmin = 1e-12 * span_len;
  constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  constexpr std::size_t max_steps = 2'000'000;

  std::vector<double> y(y0.begin(), y0.end()), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ys(n), ynew(n),
      err(n);

  auto rms = [&](const std::vector<double>& v, const std::vector<double>& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = atol + rtol * std::abs(ref[i]);
      s += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(s / static_cast<double>(n));
  };

  Sweep out;
  double x = x0;
  f(x, y, k1);
  out.x.push_back(x);
  out.y.insert(out.y.end(), y.begin(), y.end());
  out.dy.insert(out.dy.end(), k1.begin(), k1.end());
  if (hmax == 0.0) return out;

  // Initial step guess.
  double h = 0.0;
  {
    const double dnf = rms(k1, y);
    const double dny = rms(y, y);
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, hmax);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + dir * h * k1[i];
    f(x + dir * h, ys, k2);
    for (std::size_t i = 0; i < n; ++i) err[i] = (k2[i] - k1[i]) / h;
    const double der2 = rms(err, y);
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, hmax});
  }

  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  while (dir * (x1 - x) > 0.0) {
    if (++steps > max_steps) throw NumericError("integrator exceeded the maximum number of steps");
    if (h < hmin) {
      throw NumericError("step size underflow near x=" + format_number(x) +
                         " (singular coefficient or solution blow-up)");
    }
    bool final_step = false;
    if (h >= std::abs(x1 - x)) {
      h = std::abs(x1 - x);
      final_step = true;
    }
    const double hs = dir * h;
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + hs * T::a21 * k1[i];
    f(x + T::c2 * hs, ys, k2);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + hs * (T::a31 * k1[i] + T::a32 * k2[i]);
    f(x + T::c3 * hs, ys, k3);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + hs * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    f(x + T::c4 * hs, ys, k4);
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = y[i] + hs * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    }
    f(x + T::c5 * hs, ys, k5);
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = y[i] + hs * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] + T::a65 * k5[i]);
    }
    const double xnew = final_step ? x1 : x + hs;
    f(xnew, ys, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + hs * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] + T::a76 * k6[i]);
    }
    f(xnew, ynew, k7);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei =
          hs * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
      const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      e += (ei / sk) * (ei / sk);
    }
    e = std::sqrt(e / static_cast<double>(n));
    if (!std::isfinite(e)) {
      throw NumericError("non-finite solution near x=" + format_number(x) + " (singular coefficient?)");
    }

    const double fac11 = std::pow(e, expo1);
    if (e <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double hnew = h / fac;
      facold = std::max(e, 1e-4);
      ++out.accepted;
      x = xnew;
      y.swap(ynew);
      k1.swap(k7);
      out.x.push_back(x);
      out.y.insert(out.y.end(), y.begin(), y.end());
      out.dy.insert(out.dy.end(), k1.begin(), k1.end());
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = std::min(hnew, hmax);
    } else {
      ++out.rejected;
      last_rejected = true;
      h /= std::min(facc1, fac11 / safe);
    }
  }
  return out;
}

}  // namespace detail

/// Integrates dy/dx = f(x, y) with the embedded Dormand-Prince 4(5) pair and
/// PI step control. Bitwise deterministic for identical inputs. Throws
/// NumericError on step-size underflow (min step 1e-12 of the interval).
[[nodiscard]] inline Trajectory integrate_system(const OdeRhs& f, const IVP& ivp) {
  if (ivp.a == ivp.b) throw std::invalid_argument("IVP interval is empty");
  if (!(ivp.atol > 0.0) || !(ivp.rtol > 0.0)) throw std::invalid_argument("IVP tolerances must be positive");
  if (ivp.y0.empty()) throw std::invalid_argument("IVP initial state is empty");
  const double start = ivp.initial_point();
  if (start < ivp.lo() || start > ivp.hi()) throw std::invalid_argument("IVP start outside its interval");

  double scale = 0.0;
  for (double v : ivp.y0) scale = std::max(scale, std::abs(v));
  const double atol = ivp.atol * (scale > 0.0 ? scale : 1.0);
  const double len = ivp.hi() - ivp.lo();

  Trajectory traj;
  traj.dim = ivp.y0.size();
  traj.atol = ivp.atol;
  traj.rtol = ivp.rtol;

  std::optional<detail::Sweep> down, up;
  if (start > ivp.lo()) down = detail::sweep(f, start, ivp.lo(), ivp.y0, atol, ivp.rtol, len);
  if (start < ivp.hi()) up = detail::sweep(f, start, ivp.hi(), ivp.y0, atol, ivp.rtol, len);

  const std::size_t d = traj.dim;
  if (down) {
    for (std::size_t i = down->x.size(); i-- > 0;) {
      if (up && i == 0) break;  // the start node comes from the upward sweep
      traj.x.push_back(down->x[i]);
      traj.y.insert(traj.y.end(), down->y.begin() + static_cast<std::ptrdiff_t>(i * d),
                    down->y.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
      traj.dy.insert(traj.dy.end(), down->dy.begin() + static_cast<std::ptrdiff_t>(i * d),
                     down->dy.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    }
    traj.accepted += down->accepted;
    traj.rejected += down->rejected;
  }
  if (up) {
    traj.x.insert(traj.x.end(), up->x.begin(), up->x.end());
    traj.y.insert(traj.y.end(), up->y.begin(), up->y.end());
    traj.dy.insert(traj.dy.end(), up->dy.begin(), up->dy.end());
    traj.accepted += up->accepted;
    traj.rejected += up->rejected;
  }
  return traj;
}

/// phi'' = U phi + K phi' + lambda phi, the linear partner equation.
struct LinearODE {
  CoeffFn U;
  CoeffFn K;
  double lambda = 0.0;
};

/// Solves phi'' = U phi + K phi' + lambda phi + F. Trajectory state is (phi, phi').
[[nodiscard]] inline Trajectory solve_linear2_forced(const CoeffFn& U, const CoeffFn& K, double lambda,
                                                     const CoeffFn& F, const IVP& ivp) {
  if (ivp.y0.size() != 2) throw std::invalid_argument("second-order IVP needs (phi, phi') initial data");
  const bool forced = !(F.is_symbolic() && F.expr().is_const(0.0));
  auto rhs = [&](double x, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = (U.value(x) + lambda) * y[0] + K.value(x) * y[1] + (forced ? F.value(x) : 0.0);
  };
  return integrate_system(rhs, ivp);
}

/// Solves phi'' = U phi + K phi' + lambda phi. Trajectory state is (phi, phi').
[[nodiscard]] inline Trajectory solve_linear2(const CoeffFn& U, const CoeffFn& K, double lambda, const IVP& ivp) {
  return solve_linear2_forced(U, K, lambda, CoeffFn::constant(0.0), ivp);
}

[[nodiscard]] inline Trajectory solve_linear2(const LinearODE& ode, const IVP& ivp) {
  return solve_linear2(ode.U, ode.K, ode.lambda, ivp);
}

/// Grid coefficient from component 0 of a second-order trajectory, storing
/// (phi, phi', phi'') at the nodes; phi'' is the exact ODE value the
/// integrator recorded.
[[nodiscard]] inline CoeffFn grid_from_second_order(const Trajectory& t) {
  if (t.dim != 2) throw std::invalid_argument("expected a (value, derivative) trajectory");
  GridData g;
  g.x = t.x;
  g.f.reserve(t.size());
  g.df.reserve(t.size());
  g.d2f.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    g.f.push_back(t.state(i, 0));
    g.df.push_back(t.state(i, 1));
    g.d2f.push_back(t.deriv(i, 1));
  }
  return CoeffFn::grid(std::move(g));
}

/// Solves u' + coeff u + forcing = 0. The grid stores u, u' and, when the
/// coefficient derivatives are known, u'' = -(coeff' u + coeff u' + forcing').
[[nodiscard]] inline CoeffFn solve_linear1(const CoeffFn& coeff, const CoeffFn& forcing, const IVP& ivp) {
  if (ivp.y0.size() != 1) throw std::invalid_argument("first-order IVP needs one initial value");
  auto rhs = [&](double x, std::span<const double> y, std::span<double> dy) {
    dy[0] = -coeff.value(x) * y[0] - forcing.value(x);
  };
  const Trajectory t = integrate_system(rhs, ivp);
  GridData g;
  g.x = t.x;
  g.f.reserve(t.size());
  g.df.reserve(t.size());
  bool second = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = t.state(i, 0);
    const double du = t.deriv(i, 0);
    g.f.push_back(u);
    g.df.push_back(du);
    if (second) {
      const Jet c = coeff.eval(t.x[i]);
      const Jet s = forcing.eval(t.x[i]);
      const double d2 = -(c.d1 * u + c.v * du + s.d1);
      if (std::isfinite(d2)) {
        g.d2f.push_back(d2);
      } else {
        second = false;
        g.d2f.clear();
      }
    }
  }
  return CoeffFn::grid(std::move(g));
}

}  // namespace colehopf

#endif  // COLEHOPF_ODE_HPP
