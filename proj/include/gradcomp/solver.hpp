#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gradcomp/composite.hpp"
#include "gradcomp/linesearch.hpp"
#include "gradcomp/matrix.hpp"

namespace gradcomp {

enum class Regime { ModelBased, ModelFree };

/// What produced a trace row. Start, ArmijoTest and GradientEval rows each
/// stand for exactly one function evaluation; the other kinds are markers
/// that cost nothing and repeat the current evaluation index.
enum class TraceEvent { Start, ArmijoTest, GradientEval, Accept, LineSearchFail, Compensation };

std::string_view to_string(Regime r);
std::string_view to_string(TraceEvent e);

struct TraceRecord {
  std::uint64_t eval_index = 0;
  double f_value = 0.0;
  /// Error of the current iterate; only changes on Accept rows (or, for the
  /// gradient-norm metric, when a new exact gradient is measured).
  double error = 0.0;
  Regime regime = Regime::ModelFree;
  TraceEvent event = TraceEvent::Start;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// One line search (or monitor exit) and the state it ran in.
struct StepRecord {
  Regime regime = Regime::ModelFree;
  Vector x;
  Vector x_next;  // == x when no step was taken
  double f_x = 0.0;
  double f_next = 0.0;
  double eta = 0.0;
  /// Model-based only: ē at x, the compensation in force, ‖g̃(x)‖, and
  /// whether the monitor held.
  double ebar = 0.0;
  Vector delta;
  double gtilde_norm = 0.0;
  bool monitor_ok = false;
  std::uint64_t evals = 0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  std::vector<StepRecord> steps;
  Vector final_point;
  double final_value = 0.0;
  double final_error = 0.0;
  std::uint64_t total_evals = 0;
  std::size_t outer_iterations = 0;
  bool converged = false;
  /// Why the run stopped when it did not converge.
  std::string_view stop_reason;

  std::size_t accepts(Regime r) const;
  std::size_t model_based_accepts() const { return accepts(Regime::ModelBased); }
  std::size_t model_free_accepts() const { return accepts(Regime::ModelFree); }
};

enum class TerminationMetric { DistanceToReference, GradientNorm };

struct GcConfig {
  double gamma = 0.6;
  double lipschitz_residual = 0.1;
  LineSearchParams ls_model_based{0.3, 0.5, 0.005, 1.0};
  LineSearchParams ls_model_free{0.3, 0.5, 0.0, 1.0};
  std::size_t max_outer_iters = 100000;
  /// Cap on consecutive model-based steps inside one episode.
  std::size_t max_inner_steps = 1000000;
  double termination_tol = 1e-6;
  TerminationMetric termination_metric = TerminationMetric::GradientNorm;
  /// Required for DistanceToReference; also drives the trace's error column.
  std::optional<Vector> reference;

  void validate() const;
};

enum class ExitReason { MonitorViolated, LineSearchFailed, GtildeZero, Converged, StepLimit };

std::string_view to_string(ExitReason r);

struct ModelBasedResult {
  Vector x;
  double f_x = 0.0;
  ExitReason reason = ExitReason::MonitorViolated;
  std::size_t steps_taken = 0;
  double ebar = 0.0;
};

/**
 * Model-based descent with the compensation held fixed.
 *
 * Repeats: g̃ ← ∇f̂(x) + δ; leave on g̃ = 0 (GtildeZero); leave when
 * ē > ((1−γ)/γ)‖g̃‖ (MonitorViolated); modified line search along g̃ and
 * leave on failure (LineSearchFailed); otherwise step and grow ē by
 * L_r·‖Δx‖. Also leaves with Converged once the distance metric is met.
 * Appends its evaluations to the trace with regime ModelBased.
 */
ModelBasedResult model_based_descent(CompositeObjective& obj, std::span<const double> x, double f_x,
                                     const CompensationState& state, const GcConfig& config,
                                     ConvergenceTrace& trace);

/**
 * Gradient compensation: alternates model-based descent with one exact
 * gradient step, recompensating at every switch. Starts with ē = 0 and the
 * compensation measured at x0; after each model-free step ē restarts at
 * L_r·‖x₊ − x‖.
 */
ConvergenceTrace gc_solve(CompositeObjective& obj, std::span<const double> x0, const GcConfig& config);

/// Gradient descent on the exact gradient with the standard line search.
ConvergenceTrace model_free_solve(CompositeObjective& obj, std::span<const double> x0, const GcConfig& config);

}  // namespace gradcomp
