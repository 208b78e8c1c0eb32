#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "colehopf/ode.hpp"
#include "colehopf/parse.hpp"

using namespace colehopf;

namespace {

IVP ivp2(double a, double b, double v0, double v1, double tol = 1e-10) {
  IVP ivp;
  ivp.a = a;
  ivp.b = b;
  ivp.y0 = {v0, v1};
  ivp.atol = ivp.rtol = tol;
  return ivp;
}

CoeffFn sym(const char* text) { return CoeffFn::symbolic(parse(text)); }

double max_dev(const Trajectory& t, const Trajectory& ref, double lo, double hi) {
  double m = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double x = lo + (hi - lo) * i / 50.0;
    m = std::max(m, std::abs(t.at(x).first[0] - ref.at(x).first[0]));
  }
  return m;
}

}  // namespace

TEST(IntegrateSystem, SineReachesOneAtQuarterPeriod) {
  auto rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const Trajectory t = integrate_system(rhs, ivp2(0.0, std::numbers::pi / 2, 0.0, 1.0));
  EXPECT_NEAR(t.state(t.size() - 1, 0), 1.0, 1e-8);
  EXPECT_EQ(t.x.back(), std::numbers::pi / 2);
  EXPECT_GT(t.accepted, 0u);
}

TEST(IntegrateSystem, StraightLineIsExact) {
  const Trajectory t = solve_linear2(CoeffFn::constant(0.0), CoeffFn::constant(0.0), 0.0, ivp2(0.0, 3.0, 1.0, 2.0));
  EXPECT_NEAR(t.state(t.size() - 1, 0), 7.0, 1e-12);
}

TEST(IntegrateSystem, AiryRunAgreesWithTighterRun) {
  const CoeffFn U = sym("-x/2");
  const Trajectory t = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.0));
  const Trajectory r = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.0, 1e-12));
  EXPECT_LE(max_dev(t, r, 0.0, 2.0), 1e-7);
}

TEST(IntegrateSystem, BitwiseDeterministic) {
  const CoeffFn U = sym("-x/2");
  const Trajectory a = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.3));
  const Trajectory b = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.3));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.dy, b.dy);
}

TEST(IntegrateSystem, PowerOfTwoScalingGivesIdenticalSteps) {
  // The absolute tolerance follows the size of the initial state, so a linear
  // problem scaled by a power of two takes bitwise the same steps.
  const CoeffFn U = sym("-x/2");
  const Trajectory a = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.3));
  const Trajectory b = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, -4.0, -1.2));
  EXPECT_EQ(a.x, b.x);
  for (std::size_t i = 0; i < a.y.size(); ++i) ASSERT_EQ(-4.0 * a.y[i], b.y[i]);
}

TEST(IntegrateSystem, BackwardAndInteriorStart) {
  const CoeffFn U = CoeffFn::constant(-1.0);
  IVP back = ivp2(3.0, 0.0, std::sin(3.0), std::cos(3.0));
  const Trajectory t = solve_linear2(U, CoeffFn::constant(0.0), 0.0, back);
  ASSERT_EQ(t.x.front(), 0.0);
  EXPECT_NEAR(t.state(0, 0), 0.0, 1e-8);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(t.x[i - 1], t.x[i]);

  IVP mid = ivp2(0.0, 3.0, std::sin(1.0), std::cos(1.0));
  mid.start = 1.0;
  const Trajectory m = solve_linear2(U, CoeffFn::constant(0.0), 0.0, mid);
  EXPECT_EQ(m.x.front(), 0.0);
  EXPECT_EQ(m.x.back(), 3.0);
  for (std::size_t i = 1; i < m.size(); ++i) ASSERT_LT(m.x[i - 1], m.x[i]);
  for (double x : {0.0, 0.7, 1.0, 2.2, 3.0}) EXPECT_NEAR(m.at(x).first[0], std::sin(x), 1e-8);
}

TEST(IntegrateSystem, InvalidInputs) {
  auto rhs = [](double, std::span<const double>, std::span<double> dy) { dy[0] = 0.0; };
  IVP empty;
  empty.a = empty.b = 1.0;
  empty.y0 = {1.0};
  EXPECT_THROW((void)integrate_system(rhs, empty), std::invalid_argument);
  IVP neg = ivp2(0.0, 1.0, 1.0, 0.0);
  neg.atol = -1.0;
  EXPECT_THROW((void)integrate_system(rhs, neg), std::invalid_argument);
  IVP outside = ivp2(0.0, 1.0, 1.0, 0.0);
  outside.start = 2.0;
  EXPECT_THROW((void)integrate_system(rhs, outside), std::invalid_argument);
}

TEST(IntegrateSystem, SingularityReportsStepUnderflow) {
  // y' = y^2 blows up at x = 1.
  auto rhs = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  IVP ivp;
  ivp.a = 0.0;
  ivp.b = 2.0;
  ivp.y0 = {1.0};
  EXPECT_THROW((void)integrate_system(rhs, ivp), NumericError);
}

TEST(IntegrateSystem, DenseOutputOutsideSpanThrows) {
  const Trajectory t = solve_linear2(CoeffFn::constant(-1.0), CoeffFn::constant(0.0), 0.0, ivp2(0.0, 1.0, 0.0, 1.0));
  EXPECT_THROW((void)t.at(1.5), EvalError);
}

TEST(SolveLinear2, SineOnZeroToThree) {
  const Trajectory t = solve_linear2(CoeffFn::constant(-1.0), CoeffFn::constant(0.0), 0.0, ivp2(0.0, 3.0, 0.0, 1.0));
  for (std::size_t i = 0; i < t.size(); ++i) ASSERT_NEAR(t.state(i, 0), std::sin(t.x[i]), 1e-8);
}

TEST(SolveLinear2, EulerEquationGivesXSquared) {
  const Trajectory t = solve_linear2(sym("2/x^2"), CoeffFn::constant(0.0), 0.0, ivp2(1.0, 3.0, 1.0, 2.0));
  for (std::size_t i = 0; i < t.size(); ++i) ASSERT_NEAR(t.state(i, 0), t.x[i] * t.x[i], 1e-8);
}

TEST(SolveLinear2, LambdaAndKEnterTheEquation) {
  // phi'' = -2 phi + phi' + lambda phi with lambda = 1: phi = e^{x/2} (c cos + ...); compare with U absorbing lambda.
  const Trajectory a = solve_linear2(CoeffFn::constant(-2.0), CoeffFn::constant(1.0), 1.0, ivp2(0.0, 2.0, 1.0, 0.0));
  const Trajectory b = solve_linear2(CoeffFn::constant(-1.0), CoeffFn::constant(1.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.0));
  EXPECT_EQ(a.y, b.y);
}

TEST(SolveLinear2, HalvingToleranceDoesNotWorsenDeviation) {
  struct Problem {
    const char* U;
    const char* K;
    double a, b, v0, v1;
  };
  const Problem problems[] = {{"-x/2", "0", 0.0, 2.0, 1.0, 0.0},
                              {"-1", "-1/x", 0.5, 5.0, 1.0, 0.0},
                              {"-6/(1-x^2)", "2*x/(1-x^2)", -0.8, 0.8, 1.0, 0.0},
                              {"2*exp(x)", "0", 0.0, 1.0, 1.0, 1.0}};
  for (const auto& p : problems) {
    const CoeffFn U = sym(p.U), K = sym(p.K);
    const Trajectory ref = solve_linear2(U, K, 0.0, ivp2(p.a, p.b, p.v0, p.v1, 1e-13));
    for (double tol : {1e-6, 1e-7, 1e-8, 1e-9}) {
      const double d1 = max_dev(solve_linear2(U, K, 0.0, ivp2(p.a, p.b, p.v0, p.v1, tol)), ref, p.a, p.b);
      const double d2 = max_dev(solve_linear2(U, K, 0.0, ivp2(p.a, p.b, p.v0, p.v1, tol / 2)), ref, p.a, p.b);
      EXPECT_LE(d2, 2.0 * d1 + 1e-12) << p.U << " tol " << tol;
    }
  }
}

TEST(SolveLinear1, ZeroCoefficientsKeepConstant) {
  IVP ivp;
  ivp.a = 0.0;
  ivp.b = 2.0;
  ivp.y0 = {3.5};
  const CoeffFn u = solve_linear1(CoeffFn::constant(0.0), CoeffFn::constant(0.0), ivp);
  EXPECT_EQ(u.value(1.3), 3.5);
  EXPECT_EQ(u.eval(0.4).d1, 0.0);
}

TEST(SolveLinear1, ReducedHermiteCase) {
  IVP ivp;
  ivp.a = 0.0;
  ivp.b = 2.0;
  ivp.y0 = {2.0 / 3.0};
  const CoeffFn u = solve_linear1(sym("-4*x/3"), sym("16*x^3/27"), ivp);
  for (int i = 0; i <= 40; ++i) {
    const double x = 2.0 * i / 40.0;
    ASSERT_NEAR(u.value(x), 4 * x * x / 9 + 2.0 / 3.0, 1e-8) << x;
  }
}

TEST(SolveLinear1, EulerCoefficientRecovered) {
  IVP ivp;
  ivp.a = 1.0;
  ivp.b = 3.0;
  ivp.y0 = {2.0};
  const CoeffFn u = solve_linear1(sym("2/x"), CoeffFn::constant(0.0), ivp);
  for (int i = 0; i <= 40; ++i) {
    const double x = 1.0 + 2.0 * i / 40.0;
    ASSERT_NEAR(u.value(x), 2.0 / (x * x), 1e-8);
  }
  EXPECT_NEAR(u.value(1.5), 0.888888888888889, 1e-7);
  // Second derivative is stored, so the grid reproduces u'' = 12/x^4.
  EXPECT_NEAR(u.eval(1.5).d2, 12.0 / std::pow(1.5, 4), 1e-6);
}

TEST(GridEval, SymbolicIsExact) {
  const Jet j = grid_eval(sym("1/(2*x)"), 2.0);
  EXPECT_DOUBLE_EQ(j.v, 0.25);
  EXPECT_DOUBLE_EQ(j.d1, -0.125);
  EXPECT_DOUBLE_EQ(j.d2, 0.125);
}

TEST(GridEval, OutsideSpanThrows) {
  GridData g{{0.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}, {}};
  const CoeffFn f = CoeffFn::grid(g);
  EXPECT_NEAR(f.value(0.5), 0.5, 1e-15);
  EXPECT_THROW((void)f.eval(1.1), EvalError);
  EXPECT_THROW((void)f.eval(-0.1), EvalError);
}

TEST(GridEval, RejectsMalformedGrids) {
  EXPECT_THROW((void)CoeffFn::grid({{0.0}, {1.0}, {1.0}, {}}), std::invalid_argument);
  EXPECT_THROW((void)CoeffFn::grid({{0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, {}}), std::invalid_argument);
  EXPECT_THROW((void)CoeffFn::grid({{0.0, 1.0}, {1.0}, {1.0, 1.0}, {}}), std::invalid_argument);
}

TEST(GridEval, CubicWithoutSecondDerivatives) {
  // Cubic Hermite reproduces cubics exactly.
  GridData g;
  for (double x : {0.0, 0.5, 1.5, 2.0}) {
    g.x.push_back(x);
    g.f.push_back(x * x * x - x);
    g.df.push_back(3 * x * x - 1);
  }
  const CoeffFn f = CoeffFn::grid(g);
  for (double x : {0.1, 0.7, 1.9}) {
    const Jet j = f.eval(x);
    EXPECT_NEAR(j.v, x * x * x - x, 1e-14);
    EXPECT_NEAR(j.d1, 3 * x * x - 1, 1e-13);
    EXPECT_NEAR(j.d2, 6 * x, 1e-12);
  }
}

TEST(GridEval, GridAgreesWithTighterReintegration) {
  const CoeffFn U = sym("-x/2");
  const CoeffFn g = grid_from_second_order(solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.0)));
  const Trajectory ref = solve_linear2(U, CoeffFn::constant(0.0), 0.0, ivp2(0.0, 2.0, 1.0, 0.0, 1e-11));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const Jet j = g.eval(ref.x[i]);
    ASSERT_NEAR(j.v, ref.state(i, 0), 1e-9) << ref.x[i];
    ASSERT_NEAR(j.d1, ref.state(i, 1), 1e-9) << ref.x[i];
  }
}

TEST(ComputedCoeff, DerivativeShiftsAndMarksUnknown) {
  const CoeffFn g = grid_from_second_order(
      solve_linear2(CoeffFn::constant(-1.0), CoeffFn::constant(0.0), 0.0, ivp2(0.0, 1.0, 0.0, 1.0)));
  const Jet d = g.derivative().eval(0.5);
  EXPECT_NEAR(d.v, std::cos(0.5), 1e-9);
  EXPECT_NEAR(d.d1, -std::sin(0.5), 1e-8);
  EXPECT_TRUE(std::isnan(d.d2));
}
