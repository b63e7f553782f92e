#include <cmath>

#include <gtest/gtest.h>

#include "gainswitch/ode.hpp"

using namespace gainswitch;

namespace {

ode::Options tight(double rtol = 1e-10, double atol = 1e-14) {
  ode::Options o;
  o.tol = {rtol, atol};
  return o;
}

}  // namespace

TEST(Ode, ExponentialDecayMatchesClosedForm) {
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{-y[0]}; };
  const auto r = ode::integrate<1>(rhs, ode::State<1>{1.0}, 0.0, 5.0, tight());
  EXPECT_DOUBLE_EQ(r.t, 5.0);
  EXPECT_NEAR(r.y[0] / std::exp(-5.0), 1.0, 1e-8);
  EXPECT_FALSE(r.stopped_early);
}

TEST(Ode, HarmonicOscillatorKeepsPhaseAndEnergy) {
  auto rhs = [](double, const ode::State<2>& y) { return ode::State<2>{y[1], -y[0]}; };
  const double t1 = 20.0 * std::acos(-1.0);
  const auto r = ode::integrate<2>(rhs, ode::State<2>{1.0, 0.0}, 0.0, t1, tight());
  EXPECT_NEAR(r.y[0], 1.0, 1e-7);
  EXPECT_NEAR(r.y[1], 0.0, 1e-7);
}

TEST(Ode, DenseOutputIsAccurateInsideSteps) {
  auto rhs = [](double t, const ode::State<1>&) { return ode::State<1>{std::cos(t)}; };
  double worst = 0.0;
  auto obs = [&](const ode::DenseStep<1>& st) -> std::optional<double> {
    for (int j = 1; j < 4; ++j) {
      const double t = st.t0 + st.h * j / 4.0;
      worst = std::max(worst, std::abs(st(t)[0] - std::sin(t)));
    }
    return std::nullopt;
  };
  ode::integrate<1>(rhs, ode::State<1>{0.0}, 0.0, 10.0, tight(1e-10, 1e-12), obs);
  EXPECT_LT(worst, 1e-8);
}

TEST(Ode, ObserverStopReturnsInterpolatedState) {
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{y[0]}; };
  auto obs = [](const ode::DenseStep<1>& st) -> std::optional<double> {
    if (st.t1() >= 0.5) return 0.5;
    return std::nullopt;
  };
  const auto r = ode::integrate<1>(rhs, ode::State<1>{1.0}, 0.0, 3.0, tight(), obs);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_DOUBLE_EQ(r.t, 0.5);
  EXPECT_NEAR(r.y[0], std::exp(0.5), 1e-8);
}

TEST(Ode, BlowUpReportsFailureTime) {
  // y' = y^2, y(0) = 1 diverges at t = 1.
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; };
  try {
    ode::integrate<1>(rhs, ode::State<1>{1.0}, 0.0, 2.0, tight(1e-8, 1e-12));
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_NEAR(e.time(), 1.0, 1e-3);
  }
}

TEST(Ode, StepBudgetIsEnforced) {
  auto rhs = [](double t, const ode::State<1>&) { return ode::State<1>{std::cos(100.0 * t)}; };
  ode::Options o = tight();
  o.max_steps = 5;
  EXPECT_THROW(ode::integrate<1>(rhs, ode::State<1>{0.0}, 0.0, 10.0, o), IntegrationError);
}

TEST(Ode, EmptySpanIsNoOp) {
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{y[0]}; };
  const auto r = ode::integrate<1>(rhs, ode::State<1>{2.0}, 1.0, 1.0);
  EXPECT_EQ(r.y[0], 2.0);
  EXPECT_EQ(r.accepted, 0u);
}

TEST(FindRoot, LocatesCosineZero) {
  auto g = [](double x) { return std::cos(x); };
  const double r = ode::find_root(g, 1.0, 2.0, g(1.0), g(2.0));
  EXPECT_NEAR(r, std::acos(-1.0) / 2.0, 1e-14);
}

TEST(FindRoot, HandlesEndpointRoots) {
  auto g = [](double x) { return x - 1.0; };
  EXPECT_EQ(ode::find_root(g, 0.0, 1.0, -1.0, 0.0), 1.0);
  EXPECT_EQ(ode::find_root(g, 1.0, 2.0, 0.0, 1.0), 1.0);
}
