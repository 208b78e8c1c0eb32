#ifndef COLEHOPF_COEFF_HPP
#define COLEHOPF_COEFF_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "colehopf/calculus.hpp"
#include "colehopf/errors.hpp"
#include "colehopf/eval.hpp"
#include "colehopf/expr.hpp"
#include "colehopf/jet.hpp"

namespace colehopf {

/// Nodes with stored values and derivatives. `d2f` may be empty, in which case
/// interpolation is cubic Hermite on (f, f'); otherwise quintic on (f, f', f'').
struct GridData {
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> df;
  std::vector<double> d2f;

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
  [[nodiscard]] double lo() const { return x.front(); }
  [[nodiscard]] double hi() const { return x.back(); }
};

namespace detail {

// Hermite interpolation on [x0, x1]; returns value and first two derivatives.
inline Jet hermite(double x0, double x1, double f0, double d0, double s0, double f1, double d1, double s1,
                   bool quintic, double xq) {
  const double h = x1 - x0;
  const double t = (xq - x0) / h;
  double c[6] = {f0, h * d0, 0.0, 0.0, 0.0, 0.0};
  if (quintic) {
    c[2] = 0.5 * h * h * s0;
    const double a = f1 - (c[0] + c[1] + c[2]);
    const double b = h * d1 - (c[1] + 2.0 * c[2]);
    const double g = h * h * s1 - 2.0 * c[2];
    c[3] = 10.0 * a - 4.0 * b + 0.5 * g;
    c[4] = -15.0 * a + 7.0 * b - g;
    c[5] = 6.0 * a - 3.0 * b + 0.5 * g;
  } else {
    c[2] = 3.0 * (f1 - f0) - 2.0 * h * d0 - h * d1;
    c[3] = 2.0 * (f0 - f1) + h * d0 + h * d1;
  }
  double p = 0.0;
  double dp = 0.0;
  double ddp = 0.0;
  for (int k = 5; k >= 0; --k) {
    ddp = ddp * t + 2.0 * dp;
    dp = dp * t + p;
    p = p * t + c[k];
  }
  return {p, dp / h, ddp / (h * h)};
}

}  // namespace detail

/// A coefficient function of x: symbolic, a sampled grid, or computed
/// pointwise from other coefficient functions.
///
/// Values are immutable and cheap to copy. `eval` returns the value and the
/// first two derivatives; a derivative that cannot be known (for instance the
/// third derivative of a grid, reached through `derivative().derivative()`)
/// comes back as NaN.
class CoeffFn {
 public:
  using Evaluator = std::function<Jet(double)>;

  CoeffFn() : CoeffFn(constant(0.0)) {}

  /// Parameters in `params` are substituted; any left unbound make eval throw.
  [[nodiscard]] static CoeffFn symbolic(const Expr& e, const ParamMap& params = {}) {
    return CoeffFn(std::make_shared<SymbolicRep>(simplify(substitute(e, params))));
  }

  [[nodiscard]] static CoeffFn constant(double c) { return symbolic(Expr::constant(c)); }

  [[nodiscard]] static CoeffFn grid(GridData data) {
    const std::size_t n = data.x.size();
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes");
    if (data.f.size() != n || data.df.size() != n || (!data.d2f.empty() && data.d2f.size() != n)) {
      throw std::invalid_argument("grid arrays must have equal length");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(data.x[i] > data.x[i - 1])) throw std::invalid_argument("grid nodes must be strictly increasing");
    }
    return CoeffFn(std::make_shared<GridData>(std::move(data)));
  }

  [[nodiscard]] static CoeffFn computed(Evaluator fn, std::string label = "computed") {
    return CoeffFn(std::make_shared<ComputedRep>(ComputedRep{std::move(fn), std::move(label)}));
  }

  [[nodiscard]] bool is_symbolic() const noexcept { return std::holds_alternative<SymPtr>(rep_); }
  [[nodiscard]] bool is_grid() const noexcept { return std::holds_alternative<GridPtr>(rep_); }

  /// The expression of a symbolic coefficient; throws otherwise.
  [[nodiscard]] const Expr& expr() const {
    if (!is_symbolic()) throw std::logic_error("coefficient is not symbolic");
    return std::get<SymPtr>(rep_)->e;
  }
  [[nodiscard]] const GridData& grid_data() const {
    if (!is_grid()) throw std::logic_error("coefficient is not a grid");
    return *std::get<GridPtr>(rep_);
  }

  /// Value, first and second derivative at x.
  [[nodiscard]] Jet eval(double x) const {
    return std::visit([x](const auto& rep) { return eval_rep(*rep, x); }, rep_);
  }
  [[nodiscard]] double value(double x) const {
    if (is_symbolic()) return evaluate(std::get<SymPtr>(rep_)->e, Bindings{x, {}});
    return eval(x).v;
  }

  [[nodiscard]] CoeffFn derivative() const {
    if (is_symbolic()) {
      return CoeffFn(std::make_shared<SymbolicRep>(std::get<SymPtr>(rep_)->first()));
    }
    CoeffFn self = *this;
    return computed([self](double x) { return self.eval(x).shifted(); }, "derivative");
  }

  /// Human-readable form: the expression, or a grid/computed summary.
  [[nodiscard]] std::string describe() const {
    if (is_symbolic()) return to_string(expr());
    if (is_grid()) {
      const auto& g = grid_data();
      return "grid[" + std::to_string(g.size()) + " nodes on " + detail::format_number(g.lo()) + ":" +
             detail::format_number(g.hi()) + "]";
    }
    return std::get<CompPtr>(rep_)->label;
  }

 private:
  // Derivative expressions are built on first use; call_once keeps that safe
  // under concurrent evaluation.
  struct SymbolicRep {
    explicit SymbolicRep(Expr expr) : e(std::move(expr)) {}
    Expr e;
    mutable std::once_flag once;
    mutable Expr d1, d2;

    const Expr& first() const {
      ensure();
      return d1;
    }
    void ensure() const {
      std::call_once(once, [this] {
        d1 = differentiate(e);
        d2 = differentiate(d1);
      });
    }
  };
  struct ComputedRep {
    Evaluator fn;
    std::string label;
  };
  using SymPtr = std::shared_ptr<const SymbolicRep>;
  using GridPtr = std::shared_ptr<const GridData>;
  using CompPtr = std::shared_ptr<const ComputedRep>;

  explicit CoeffFn(SymPtr p) : rep_(std::move(p)) {}
  explicit CoeffFn(GridPtr p) : rep_(std::move(p)) {}
  explicit CoeffFn(CompPtr p) : rep_(std::move(p)) {}

  static Jet eval_rep(const SymbolicRep& s, double x) {
    s.ensure();
    const Bindings b{x, {}};
    return {evaluate(s.e, b), evaluate(s.d1, b), evaluate(s.d2, b)};
  }

  static Jet eval_rep(const ComputedRep& c, double x) { return c.fn(x); }

  static Jet eval_rep(const GridData& g, double x) {
    // Accept round-off overshoot at the ends of the span.
    const double slack = 1e-12 * (std::abs(g.hi()) + std::abs(g.lo()) + (g.hi() - g.lo()));
    if (!(x >= g.lo() - slack && x <= g.hi() + slack)) {
      throw EvalError("grid evaluated at x=" + detail::format_number(x) + " outside [" +
                      detail::format_number(g.lo()) + ", " + detail::format_number(g.hi()) + "]");
    }
    x = std::clamp(x, g.lo(), g.hi());
    auto it = std::upper_bound(g.x.begin(), g.x.end(), x);
    std::size_t i = static_cast<std::size_t>(it - g.x.begin());
    i = std::clamp<std::size_t>(i, 1, g.size() - 1);
    const bool quintic = !g.d2f.empty();
    const double s0 = quintic ? g.d2f[i - 1] : 0.0;
    const double s1 = quintic ? g.d2f[i] : 0.0;
    return detail::hermite(g.x[i - 1], g.x[i], g.f[i - 1], g.df[i - 1], s0, g.f[i], g.df[i], s1, quintic, x);
  }

  std::variant<SymPtr, GridPtr, CompPtr> rep_;
};

/// Value and first two derivatives of `g` at x. Symbolic coefficients are
/// exact; grids interpolate and throw EvalError outside their span.
[[nodiscard]] inline Jet grid_eval(const CoeffFn& g, double x) { return g.eval(x); }

/// Applies `formula` to coefficient functions. When every argument is symbolic
/// the formula runs on expressions and the result is a simplified symbolic
/// coefficient; otherwise it runs pointwise on jets.
template <class Formula, class... Args>
[[nodiscard]] CoeffFn combine(std::string label, Formula formula, const Args&... args) {
  static_assert((std::is_same_v<Args, CoeffFn> && ...));
  if ((args.is_symbolic() && ...)) return CoeffFn::symbolic(formula(args.expr()...));
  return CoeffFn::computed([formula, args...](double x) { return formula(args.eval(x)...); }, std::move(label));
}

/// Maximum |f| over n Chebyshev points of [lo, hi]; used to detect vanishing coefficients.
[[nodiscard]] inline double max_abs(const CoeffFn& f, double lo, double hi, std::size_t n) {
  double m = 0.0;
  for (double x : chebyshev_points(lo, hi, n)) m = std::max(m, std::abs(f.value(x)));
  return m;
}

/// Minimum |f| over n Chebyshev points of [lo, hi].
[[nodiscard]] inline double min_abs(const CoeffFn& f, double lo, double hi, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : chebyshev_points(lo, hi, n)) m = std::min(m, std::abs(f.value(x)));
  return m;
}

}  // namespace colehopf

#endif  // COLEHOPF_COEFF_HPP
