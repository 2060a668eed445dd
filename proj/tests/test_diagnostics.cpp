#include <gtest/gtest.h>

#include <cmath>

#include "gradcomp/diagnostics.hpp"
#include "gradcomp/error.hpp"

using namespace gradcomp;

namespace {

RateDiagnostics budget_case() {
  RateDiagnostics d;
  d.kappa_max = 1.0;
  d.kappa_min = 0.9;
  d.gamma = 0.5;
  d.eta_max = 1.0;
  d.L_r = 0.1;
  return d;
}

}  // namespace

TEST(Nmin, UnitKappaMaxScan) {
  // log N + N·log(1/0.9) against log 10: N = 5 gives 2.136, N = 6 gives 2.424.
  EXPECT_EQ(nmin_bound(budget_case()), 5u);
}

TEST(Nmin, NonIncreasingInLr) {
  RateDiagnostics d = budget_case();
  std::uint64_t prev = UINT64_MAX;
  for (double lr : {0.01, 0.1, 1.0, 10.0}) {
    d.L_r = lr;
    const std::uint64_t n = nmin_bound(d);
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(Nmin, GeneralKappaMaxMatchesDirectInequality) {
  RateDiagnostics d = budget_case();
  d.kappa_max = 0.99;
  d.kappa_min = 0.8;
  const std::uint64_t n = nmin_bound(d);
  auto holds = [&](double nn) {
    const double lhs = (1.0 - std::pow(d.kappa_max, nn)) / (1.0 - d.kappa_max) / std::pow(d.kappa_min, nn);
    return lhs <= (1.0 - d.gamma) / (d.gamma * d.eta_max * d.L_r);
  };
  EXPECT_TRUE(holds(static_cast<double>(n)));
  EXPECT_FALSE(holds(static_cast<double>(n + 1)));
}

TEST(Nmin, ZeroWhenFirstStepAlreadyFails) {
  RateDiagnostics d = budget_case();
  d.L_r = 100.0;
  EXPECT_EQ(nmin_bound(d), 0u);
}

TEST(Nmin, RejectsBadInputs) {
  RateDiagnostics d = budget_case();
  d.L_r = 0.0;
  EXPECT_THROW(nmin_bound(d), std::invalid_argument);
  d = budget_case();
  d.kappa_min = 1.0;
  EXPECT_THROW(nmin_bound(d), std::invalid_argument);
}

TEST(Prop2, GeometricFactor) {
  RateDiagnostics d;
  d.mu = 1.0;
  d.alpha = 0.3;
  d.gamma = 0.5;
  d.eta_min = 0.005;
  double want = 2.0;
  for (int i = 0; i < 100; ++i) want *= 0.99925;
  EXPECT_NEAR(prop2_bound(d, 100, 2.0), want, 1e-14);
  EXPECT_EQ(prop2_bound(d, 0, 2.0), 2.0);
  d.eta_min = 1e6;
  EXPECT_EQ(prop2_bound(d, 3, 2.0), 0.0);
}

TEST(Progress, PerEvaluationRates) {
  RateDiagnostics d;
  d.mu = 1.0;
  d.L_f = 10.0;
  d.alpha = 0.3;
  d.gamma = 0.5;
  d.eta_min = 0.005;
  const ProgressRates r = progress_per_eval(d, 9, 4);
  EXPECT_NEAR(r.model_based, -std::log1p(-0.00075) / 9.0, 1e-16);
  EXPECT_NEAR(r.model_based, 8.336e-5, 1e-8);
  EXPECT_NEAR(r.model_free, -std::log1p(-0.1) / 4.0, 1e-15);
}

TEST(Kappa, FromModelHessian) {
  const Matrix p = Matrix::diagonal(Vector{0.5, 2.0});
  const KappaBounds k = bounded_direction_constants(p, 0.01, 0.4);
  EXPECT_DOUBLE_EQ(k.kappa_max, 1.0 - 0.01 * 0.5);
  EXPECT_DOUBLE_EQ(k.kappa_min, 1.0 - 0.4 * 2.0);
  EXPECT_THROW(bounded_direction_constants(p, 0.01, 0.5), InvalidRegime);
}
