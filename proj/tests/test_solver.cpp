#include <gtest/gtest.h>

#include <cmath>

#include "gradcomp/quadbench.hpp"
#include "gradcomp/solver.hpp"
#include "scalar_problems.hpp"

using namespace gradcomp;

namespace {

GcConfig parabola_config() {
  GcConfig c;
  c.gamma = 0.5;
  c.lipschitz_residual = 2.0;
  c.ls_model_based = {0.3, 0.5, 1e-4, 0.4};
  c.ls_model_free = {0.3, 0.5, 0.0, 0.4};
  c.reference = Vector{2.0};
  c.termination_metric = TerminationMetric::DistanceToReference;
  c.termination_tol = 1e-3;
  return c;
}

bool is_evaluation(TraceEvent e) {
  return e == TraceEvent::Start || e == TraceEvent::ArmijoTest || e == TraceEvent::GradientEval;
}

void expect_contiguous_indices(const ConvergenceTrace& t) {
  std::uint64_t expected = 0;
  for (const auto& r : t.records) {
    if (is_evaluation(r.event)) {
      ASSERT_EQ(r.eval_index, ++expected);
    } else {
      ASSERT_EQ(r.eval_index, expected);
    }
  }
  EXPECT_EQ(expected, t.total_evals);
}

}  // namespace

TEST(ModelBasedDescent, StuckDirectionLeavesRegime) {
  // g̃ = 2x drives iterates towards 0 rather than the minimiser 2.
  auto obj = testing_problems::shifted_parabola();
  const GcConfig config = parabola_config();
  ConvergenceTrace trace;
  const CompensationState state{Vector{0.0}, 0.0, config.lipschitz_residual, config.gamma};
  const Vector x{-1.0};
  const ModelBasedResult r = model_based_descent(*obj, x, 9.0, state, config, trace);
  EXPECT_TRUE(r.reason == ExitReason::MonitorViolated || r.reason == ExitReason::GtildeZero);
  EXPECT_LT(r.x[0], 0.0);
  for (const auto& s : trace.steps) {
    if (s.eta > 0) EXPECT_TRUE(s.monitor_ok);
  }
}

TEST(ModelBasedDescent, WithoutMonitorWouldNotStop) {
  // L_r = 0 disables the monitor; the step limit is then what ends the run.
  auto obj = testing_problems::shifted_parabola();
  GcConfig config = parabola_config();
  config.max_inner_steps = 50;
  ConvergenceTrace trace;
  const CompensationState state{Vector{0.0}, 0.0, 0.0, config.gamma};
  const ModelBasedResult r = model_based_descent(*obj, Vector{-1.0}, 9.0, state, config, trace);
  // Near 0 the steps stop decreasing f at working precision, so the
  // search may fail before the limit; the monitor never fires.
  EXPECT_TRUE(r.reason == ExitReason::StepLimit || r.reason == ExitReason::LineSearchFailed);
  EXPECT_GE(r.steps_taken, 20u);
  EXPECT_LE(r.x[0], 0.0);
}

TEST(GcSolve, EscapesStuckModelAndConverges) {
  auto obj = testing_problems::shifted_parabola();
  const ConvergenceTrace t = gc_solve(*obj, Vector{-1.0}, parabola_config());
  ASSERT_TRUE(t.converged);
  EXPECT_LT(std::abs(t.final_point[0] - 2.0), 1e-3);
}

TEST(GcSolve, StartAtReferenceCostsNothing) {
  auto obj = testing_problems::shifted_parabola();
  const ConvergenceTrace t = gc_solve(*obj, Vector{2.0}, parabola_config());
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.total_evals, 0u);
  EXPECT_TRUE(t.records.empty());
}

TEST(GcSolve, GradientNormTermination) {
  auto obj = testing_problems::shifted_parabola(false);
  GcConfig c = parabola_config();
  c.reference.reset();
  c.termination_metric = TerminationMetric::GradientNorm;
  c.termination_tol = 1e-6;
  const ConvergenceTrace t = gc_solve(*obj, Vector{-1.0}, c);
  ASSERT_TRUE(t.converged);
  EXPECT_NEAR(t.final_point[0], 2.0, 1e-6);
  expect_contiguous_indices(t);
}

TEST(GcSolve, ConfigValidation) {
  auto obj = testing_problems::shifted_parabola();
  GcConfig c = parabola_config();
  c.gamma = 1.0;
  EXPECT_THROW(gc_solve(*obj, Vector{0.0}, c), std::invalid_argument);
  c = parabola_config();
  c.ls_model_based.eta_min = 0.0;
  EXPECT_THROW(gc_solve(*obj, Vector{0.0}, c), std::invalid_argument);
  c = parabola_config();
  c.reference.reset();
  EXPECT_THROW(gc_solve(*obj, Vector{0.0}, c), std::invalid_argument);
}

TEST(ModelFreeSolve, StallIsReported) {
  // Flat objective with a bogus gradient: no trial can decrease f.
  CompositeObjective obj(
      1, [](std::span<const double>) { return 1.0; }, [](std::span<const double>) { return Vector{0.0}; },
      [](std::span<const double>, double, const Evaluator&) { return Vector{1.0}; });
  GcConfig c;
  c.termination_tol = 1e-9;
  const ConvergenceTrace t = model_free_solve(obj, Vector{0.0}, c);
  EXPECT_FALSE(t.converged);
  EXPECT_EQ(t.stop_reason, "model-free line search failed");
  EXPECT_EQ(t.total_evals, static_cast<std::uint64_t>(kMaxHalvings) + 2);  // start + every trial
}

TEST(Trace, QuadraticRunsKeepAccountingInvariants) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const QuadraticInstance inst = make_quadratic(rng);
    GcConfig c;
    c.reference = inst.x_star;
    c.termination_metric = TerminationMetric::DistanceToReference;
    c.termination_tol = 1e-3;
    for (bool gc : {true, false}) {
      auto obj = quad_objective(inst);
      const ConvergenceTrace t = gc ? gc_solve(*obj, inst.x_hat_star, c) : model_free_solve(*obj, inst.x_hat_star, c);
      ASSERT_TRUE(t.converged);
      EXPECT_EQ(t.total_evals, obj->evaluations());
      expect_contiguous_indices(t);
      // Error only moves on Accept rows.
      for (std::size_t i = 1; i < t.records.size(); ++i) {
        if (t.records[i].event != TraceEvent::Accept) {
          ASSERT_EQ(t.records[i].error, t.records[i - 1].error);
        }
      }
      EXPECT_EQ(t.records.back().event, TraceEvent::Accept);
      EXPECT_LT(t.final_error, 1e-3);
      if (!gc) EXPECT_EQ(t.model_based_accepts(), 0u);
    }
  }
}

TEST(Trace, ModelBasedSearchesStayWithinBudget) {
  Rng rng(6);
  const QuadraticInstance inst = make_quadratic(rng);
  GcConfig c;
  c.reference = inst.x_star;
  c.termination_metric = TerminationMetric::DistanceToReference;
  c.termination_tol = 1e-3;
  auto obj = quad_objective(inst);
  const ConvergenceTrace t = gc_solve(*obj, inst.x_hat_star, c);
  const std::uint64_t budget = m_max(c.ls_model_based);
  for (const auto& s : t.steps) {
    if (s.regime == Regime::ModelBased) EXPECT_LE(s.evals, budget);
    if (s.regime == Regime::ModelBased && s.eta > 0) {
      EXPECT_GE(s.eta, c.ls_model_based.eta_min * c.ls_model_based.beta);
      EXPECT_LE(s.f_next, s.f_x - c.ls_model_based.alpha * s.eta * s.gtilde_norm * s.gtilde_norm);
    }
  }
}

TEST(Trace, EbarBoundsCompensationError) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const QuadraticInstance inst = make_quadratic(rng);
    GcConfig c;
    c.lipschitz_residual = inst.lr_true;
    c.reference = inst.x_star;
    c.termination_metric = TerminationMetric::DistanceToReference;
    c.termination_tol = 1e-3;
    auto obj = quad_objective(inst, {.analytic = true});
    const ConvergenceTrace t = gc_solve(*obj, inst.x_hat_star, c);
    ASSERT_TRUE(t.converged);
    for (const auto& s : t.steps) {
      if (s.regime != Regime::ModelBased) continue;
      const double err = norm2(subtract(inst.residual_gradient(s.x), s.delta));
      EXPECT_GE(s.ebar + 1e-12 * (1.0 + norm2(s.delta)), err);
    }
  }
}
