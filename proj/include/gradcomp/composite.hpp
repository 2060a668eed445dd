#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "gradcomp/matrix.hpp"

namespace gradcomp {

/// Monotone count of objective evaluations. Increments are atomic so that
/// rollouts may be spread over threads; readers only ever see growth.
class EvalCounter {
 public:
  EvalCounter() = default;
  EvalCounter(const EvalCounter&) = delete;
  EvalCounter& operator=(const EvalCounter&) = delete;

  std::uint64_t count() const noexcept { return count_.load(std::memory_order_relaxed); }
  void increment(std::uint64_t by = 1) noexcept { count_.fetch_add(by, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

/// Counted evaluation of f, handed to exact-gradient schemes.
using Evaluator = std::function<double(std::span<const double>)>;

/// Exact-gradient scheme: receives x, the already-known f(x), and a counting
/// evaluator. Every call of the evaluator is one function evaluation.
using GradientScheme = std::function<Vector(std::span<const double> x, double f_x, const Evaluator& eval)>;

/// (f(x + h·eⱼ) − f(x)) / h, reusing the known f(x): n evaluations.
GradientScheme forward_difference(double step);
/// (f(x + h·eⱼ) − f(x − h·eⱼ)) / 2h: 2n evaluations, plus point then minus point per j.
GradientScheme central_difference(double step);
/// f(x + r·eⱼ) / r for every j: n evaluations. This is the literal
/// one-point estimator Σⱼ (1/r²)·f(x + Uⱼ)·Uⱼ with Uⱼ = r·eⱼ; it carries an
/// f(x)/r offset in every coordinate and is not a consistent gradient
/// estimate. Shipped for fidelity comparisons only.
GradientScheme one_point(double radius);

struct ExactGradient {
  Vector gradient;
  /// Function evaluations spent. Zero only in oracle mode.
  std::uint64_t evals = 0;
  /// f at each probed point, in evaluation order.
  std::vector<double> samples;
  /// True when the analytic test oracle answered (uncounted).
  bool oracle_mode = false;
};

/**
 * Composite objective f = f̂ + r.
 *
 * f is only available through counted evaluations; ∇f̂ is closed-form and
 * free; ∇f is produced by a zeroth-order scheme on top of the counted
 * evaluations. An analytic ∇f may be attached for tests ("oracle mode"):
 * it is never counted, and is used by exact_gradient() only when enabled.
 */
class CompositeObjective {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<Vector(std::span<const double>)>;

  CompositeObjective(std::size_t dim, ValueFn value, GradientFn model_gradient, GradientScheme exact_scheme);

  CompositeObjective(const CompositeObjective&) = delete;
  CompositeObjective& operator=(const CompositeObjective&) = delete;

  std::size_t dim() const noexcept { return dim_; }

  /// One counted evaluation of f.
  double eval(std::span<const double> x);

  /// ∇f at x via the configured scheme (or the oracle, if enabled).
  /// Throws Diverged when any probed value is non-finite.
  ExactGradient exact_gradient(std::span<const double> x, double f_x);

  /// ∇f̂ at x; never counted.
  Vector model_gradient(std::span<const double> x) const;

  void set_model_value(ValueFn fhat) { model_value_ = std::move(fhat); }
  std::optional<double> model_value(std::span<const double> x) const;

  void set_oracle_gradient(GradientFn grad) { oracle_gradient_ = std::move(grad); }
  void use_oracle_gradient(bool on);
  bool oracle_mode() const noexcept { return use_oracle_; }

  std::uint64_t evaluations() const noexcept { return counter_.count(); }
  const EvalCounter& counter() const noexcept { return counter_; }

 private:
  std::size_t dim_;
  ValueFn value_;
  GradientFn model_gradient_;
  GradientScheme exact_scheme_;
  ValueFn model_value_;
  GradientFn oracle_gradient_;
  bool use_oracle_ = false;
  EvalCounter counter_;
};

/// Compensation δ, smoothness constant and monitor parameter, plus the
/// running error bound ē.
struct CompensationState {
  Vector delta;
  double ebar = 0.0;
  /// L_r, Lipschitz constant of ∇r; a configuration input.
  double lipschitz_residual = 0.0;
  /// γ ∈ (0, 1)
  double gamma = 0.5;
};

struct Compensation {
  Vector delta;
  /// The exact gradient the compensation was built from.
  ExactGradient exact;
};

/// δ = ∇f(x̃) − ∇f̂(x̃). f_tilde must be f(x̃), already evaluated.
Compensation compensate(CompositeObjective& obj, std::span<const double> x_tilde, double f_tilde);

/// g̃(x) = ∇f̂(x) + δ; costs no evaluations.
Vector compensated_gradient(const CompositeObjective& obj, const CompensationState& state,
                            std::span<const double> x);

/// ē ← L_r·‖x_next − x_prev‖ + ē
CompensationState ebar_update(CompensationState state, std::span<const double> x_prev,
                              std::span<const double> x_next);

/// ē ≤ ((1 − γ)/γ)·‖g̃‖, and false whenever g̃ = 0 so the caller leaves the
/// model-based regime to check stationarity with the exact gradient.
bool monitor_ok(const CompensationState& state, std::span<const double> gtilde);

}  // namespace gradcomp
