#include <gtest/gtest.h>

#include <cmath>

#include "gradcomp/composite.hpp"
#include "gradcomp/error.hpp"
#include "scalar_problems.hpp"

using namespace gradcomp;

namespace {

// f(x) = Σ cᵢ xᵢ² + xᵢ³ / 3 with model part Σ cᵢ xᵢ².
std::unique_ptr<CompositeObjective> cubic(GradientScheme scheme) {
  return std::make_unique<CompositeObjective>(
      3,
      [](std::span<const double> x) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i] * x[i] + x[i] * x[i] * x[i] / 3.0;
        return s;
      },
      [](std::span<const double> x) {
        Vector g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (i + 1.0) * x[i];
        return g;
      },
      std::move(scheme));
}

Vector cubic_gradient(std::span<const double> x) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (i + 1.0) * x[i] + x[i] * x[i];
  return g;
}

}  // namespace

TEST(Composite, EvalCountsOnePerCall) {
  auto obj = cubic(forward_difference(1e-6));
  const Vector x{0.1, 0.2, 0.3};
  obj->eval(x);
  obj->eval(x);
  EXPECT_EQ(obj->evaluations(), 2u);
  obj->model_gradient(x);
  EXPECT_EQ(obj->evaluations(), 2u);
}

TEST(Composite, ForwardDifferenceCostsDimension) {
  auto obj = cubic(forward_difference(1e-6));
  const Vector x{0.5, -0.3, 1.2};
  const double fx = obj->eval(x);
  const ExactGradient g = obj->exact_gradient(x, fx);
  EXPECT_EQ(g.evals, 3u);
  EXPECT_EQ(g.samples.size(), 3u);
  EXPECT_EQ(obj->evaluations(), 4u);
  const Vector want = cubic_gradient(x);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.gradient[i], want[i], 1e-5);
}

TEST(Composite, CentralDifferenceCostsTwiceDimension) {
  auto obj = cubic(central_difference(1e-4));
  const Vector x{0.5, -0.3, 1.2};
  const ExactGradient g = obj->exact_gradient(x, obj->eval(x));
  EXPECT_EQ(g.evals, 6u);
  const Vector want = cubic_gradient(x);
  // Error is h²/3 for a cubic term.
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.gradient[i], want[i], 1e-8);
}

TEST(Composite, OnePointIsValueOverRadius) {
  auto obj = cubic(one_point(1e-3));
  const Vector x{0.5, -0.3, 1.2};
  const ExactGradient g = obj->exact_gradient(x, obj->eval(x));
  EXPECT_EQ(g.evals, 3u);
  for (int j = 0; j < 3; ++j) {
    Vector probe = x;
    probe[j] += 1e-3;
    auto plain = cubic(one_point(1e-3));
    EXPECT_DOUBLE_EQ(g.gradient[j], plain->eval(probe) / 1e-3);
  }
}

TEST(Composite, NonPositiveStepRejected) {
  EXPECT_THROW(forward_difference(0.0), std::invalid_argument);
  EXPECT_THROW(central_difference(-1.0), std::invalid_argument);
  EXPECT_THROW(one_point(0.0), std::invalid_argument);
}

TEST(Composite, OracleModeIsUncounted) {
  auto obj = testing_problems::shifted_parabola(true);
  const Vector x{0.5};
  const ExactGradient g = obj->exact_gradient(x, 2.25);
  EXPECT_TRUE(g.oracle_mode);
  EXPECT_EQ(g.evals, 0u);
  EXPECT_EQ(obj->evaluations(), 0u);
  EXPECT_DOUBLE_EQ(g.gradient[0], -3.0);
}

TEST(Composite, OracleModeNeedsOracle) {
  auto obj = cubic(forward_difference(1e-6));
  EXPECT_THROW(obj->use_oracle_gradient(true), std::logic_error);
}

TEST(Composite, NonFiniteProbeDiverges) {
  CompositeObjective obj(
      1, [](std::span<const double> x) { return x[0] > 0 ? INFINITY : 0.0; },
      [](std::span<const double>) { return Vector{0.0}; }, forward_difference(1e-3));
  EXPECT_THROW(obj.exact_gradient(Vector{0.0}, 0.0), Diverged);
}

TEST(Compensation, DeltaIsResidualGradient) {
  auto obj = testing_problems::shifted_parabola(true);
  const Vector x{3.0};
  const Compensation c = compensate(*obj, x, 1.0);
  EXPECT_DOUBLE_EQ(c.delta[0], -4.0);

  CompensationState st{c.delta, 0.0, 0.0, 0.5};
  // g̃ = ∇f̂ + δ equals ∇f everywhere because ∇r is constant here.
  for (double v : {-1.0, 0.0, 2.0, 7.5}) {
    EXPECT_DOUBLE_EQ(compensated_gradient(*obj, st, Vector{v})[0], 2.0 * (v - 2.0));
  }
}

TEST(Compensation, EbarAccumulatesStepLengths) {
  CompensationState st{Vector{0, 0}, 0.25, 2.0, 0.5};
  st = ebar_update(st, Vector{0, 0}, Vector{3, 4});
  EXPECT_DOUBLE_EQ(st.ebar, 0.25 + 2.0 * 5.0);
  st = ebar_update(st, Vector{3, 4}, Vector{3, 4});
  EXPECT_DOUBLE_EQ(st.ebar, 10.25);
}

TEST(Compensation, MonitorThreshold) {
  CompensationState st{Vector{0}, 1.0, 1.0, 0.5};  // (1 − γ)/γ = 1
  EXPECT_TRUE(monitor_ok(st, Vector{1.0}));
  EXPECT_FALSE(monitor_ok(st, Vector{0.999}));
  st.ebar = 0.0;
  EXPECT_FALSE(monitor_ok(st, Vector{0.0}));
  EXPECT_TRUE(monitor_ok(st, Vector{1e-300}));
}
