#include "gradcomp/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gradcomp {

std::string_view to_string(Regime r) { return r == Regime::ModelBased ? "MB" : "MF"; }

std::string_view to_string(TraceEvent e) {
  switch (e) {
    case TraceEvent::Start: return "Start";
    case TraceEvent::ArmijoTest: return "ArmijoTest";
    case TraceEvent::GradientEval: return "GradientEval";
    case TraceEvent::Accept: return "Accept";
    case TraceEvent::LineSearchFail: return "LineSearchFail";
    case TraceEvent::Compensation: return "Compensation";
  }
  return "?";
}

std::string_view to_string(ExitReason r) {
  switch (r) {
    case ExitReason::MonitorViolated: return "MonitorViolated";
    case ExitReason::LineSearchFailed: return "LineSearchFailed";
    case ExitReason::GtildeZero: return "GtildeZero";
    case ExitReason::Converged: return "Converged";
    case ExitReason::StepLimit: return "StepLimit";
  }
  return "?";
}

std::size_t ConvergenceTrace::accepts(Regime r) const {
  std::size_t n = 0;
  for (const auto& rec : records) {
    if (rec.event == TraceEvent::Accept && rec.regime == r) ++n;
  }
  return n;
}

void GcConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("GcConfig: gamma must lie in (0, 1)");
  if (!(lipschitz_residual >= 0.0)) throw std::invalid_argument("GcConfig: L_r must be non-negative");
  ls_model_based.validate();
  ls_model_free.validate();
  if (!(ls_model_based.eta_min > 0.0)) {
    throw std::invalid_argument("GcConfig: model-based line search needs eta_min > 0");
  }
  if (!(termination_tol > 0.0)) throw std::invalid_argument("GcConfig: termination_tol must be positive");
  if (termination_metric == TerminationMetric::DistanceToReference && !reference) {
    throw std::invalid_argument("GcConfig: distance termination needs a reference point");
  }
}

namespace {

// Trace bookkeeping shared by both solvers. The error column is the
// distance to the reference when there is one, otherwise the norm of the
// most recently measured exact gradient.
class Log {
 public:
  Log(CompositeObjective& obj, const GcConfig& config, ConvergenceTrace& trace)
      : obj_(obj), config_(config), trace_(trace) {}

  double error_at(std::span<const double> x) const {
    if (config_.reference) return distance(x, *config_.reference);
    return trace_.records.empty() ? std::numeric_limits<double>::quiet_NaN() : trace_.records.back().error;
  }

  void row(double f, double error, Regime regime, TraceEvent event) {
    trace_.records.push_back({obj_.evaluations(), f, error, regime, event});
  }

  void trials(const LineSearchOutcome& ls, std::span<const double> x, Regime regime) {
    const double err = error_at(x);
    // Every trial is one evaluation; reconstruct their indices in order.
    std::uint64_t index = obj_.evaluations() - ls.evals_used;
    for (const auto& t : ls.trials) {
      trace_.records.push_back({++index, t.f_value, err, regime, TraceEvent::ArmijoTest});
    }
  }

  // Error shown on the rows of a fresh exact gradient.
  double error_with_gradient(std::span<const double> x, std::span<const double> g) const {
    return config_.reference ? distance(x, *config_.reference) : norm2(g);
  }

  void gradient(const ExactGradient& g, double err, Regime regime) {
    std::uint64_t index = obj_.evaluations() - g.evals;
    for (double v : g.samples) {
      trace_.records.push_back({++index, v, err, regime, TraceEvent::GradientEval});
    }
  }

  bool reached(std::span<const double> x) const {
    return config_.termination_metric == TerminationMetric::DistanceToReference &&
           distance(x, *config_.reference) < config_.termination_tol;
  }

 private:
  CompositeObjective& obj_;
  const GcConfig& config_;
  ConvergenceTrace& trace_;
};

void finish(ConvergenceTrace& trace, const CompositeObjective& obj, std::uint64_t start_count,
            std::span<const double> x, double f_x, double error, bool converged, std::string_view why) {
  trace.final_point.assign(x.begin(), x.end());
  trace.final_value = f_x;
  trace.final_error = error;
  trace.total_evals = obj.evaluations() - start_count;
  trace.converged = converged;
  trace.stop_reason = converged ? std::string_view{} : why;
}

bool gradient_small(const GcConfig& config, std::span<const double> g) {
  return config.termination_metric == TerminationMetric::GradientNorm && norm2(g) <= config.termination_tol;
}

}  // namespace

ModelBasedResult model_based_descent(CompositeObjective& obj, std::span<const double> x0, double f_x0,
                                     const CompensationState& state, const GcConfig& config,
                                     ConvergenceTrace& trace) {
  Log log(obj, config, trace);
  ModelBasedResult out;
  out.x.assign(x0.begin(), x0.end());
  out.f_x = f_x0;
  CompensationState st = state;

  for (;;) {
    if (out.steps_taken >= config.max_inner_steps) {
      out.reason = ExitReason::StepLimit;
      break;
    }
    const Vector g = compensated_gradient(obj, st, out.x);
    StepRecord rec;
    rec.regime = Regime::ModelBased;
    rec.x = out.x;
    rec.x_next = out.x;
    rec.f_x = out.f_x;
    rec.f_next = out.f_x;
    rec.ebar = st.ebar;
    rec.delta = st.delta;
    rec.gtilde_norm = norm2(g);

    if (rec.gtilde_norm == 0.0) {
      trace.steps.push_back(std::move(rec));
      out.reason = ExitReason::GtildeZero;
      break;
    }
    if (!monitor_ok(st, g)) {
      trace.steps.push_back(std::move(rec));
      out.reason = ExitReason::MonitorViolated;
      break;
    }
    rec.monitor_ok = true;

    LineSearchOutcome ls = bt_line_search(obj, out.x, out.f_x, g, config.ls_model_based);
    log.trials(ls, out.x, Regime::ModelBased);
    rec.evals = ls.evals_used;
    if (!ls.succeeded()) {
      log.row(out.f_x, log.error_at(out.x), Regime::ModelBased, TraceEvent::LineSearchFail);
      trace.steps.push_back(std::move(rec));
      out.reason = ExitReason::LineSearchFailed;
      break;
    }
    rec.eta = ls.eta;
    rec.x_next = ls.accepted_point;
    rec.f_next = ls.f_at_accepted;
    trace.steps.push_back(std::move(rec));

    st = ebar_update(st, out.x, ls.accepted_point);
    out.x = std::move(ls.accepted_point);
    out.f_x = ls.f_at_accepted;
    ++out.steps_taken;
    log.row(out.f_x, log.error_at(out.x), Regime::ModelBased, TraceEvent::Accept);

    if (log.reached(out.x)) {
      out.reason = ExitReason::Converged;
      break;
    }
  }
  out.ebar = st.ebar;
  return out;
}

ConvergenceTrace gc_solve(CompositeObjective& obj, std::span<const double> x0, const GcConfig& config) {
  config.validate();
  ConvergenceTrace trace;
  Log log(obj, config, trace);
  const std::uint64_t start_count = obj.evaluations();
  Vector x(x0.begin(), x0.end());
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  if (log.reached(x)) {
    finish(trace, obj, start_count, x, kNaN, log.error_at(x), true, {});
    return trace;
  }

  double f_x = obj.eval(x);
  log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::Start);

  // First compensation at the starting point; ē starts at zero there.
  Compensation comp = compensate(obj, x, f_x);
  Vector comp_point = x;
  auto record_compensation = [&] {
    const double err = log.error_with_gradient(x, comp.exact.gradient);
    log.gradient(comp.exact, err, Regime::ModelFree);
    log.row(f_x, err, Regime::ModelFree, TraceEvent::Compensation);
  };
  record_compensation();
  if (gradient_small(config, comp.exact.gradient)) {
    finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
    return trace;
  }

  CompensationState state{comp.delta, 0.0, config.lipschitz_residual, config.gamma};

  for (std::size_t outer = 1; outer <= config.max_outer_iters; ++outer) {
    trace.outer_iterations = outer;

    ModelBasedResult mb = model_based_descent(obj, x, f_x, state, config, trace);
    x = std::move(mb.x);
    f_x = mb.f_x;
    if (mb.reason == ExitReason::Converged) {
      finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
      return trace;
    }

    // Recompensate where the model-based episode stopped. When it took no
    // step the gradient measured at this very point is still current.
    if (x != comp_point) {
      comp = compensate(obj, x, f_x);
      comp_point = x;
      record_compensation();
    }
    state.delta = comp.delta;
    const Vector& grad = comp.exact.gradient;
    if (gradient_small(config, grad)) {
      finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
      return trace;
    }

    LineSearchOutcome ls = bt_line_search(obj, x, f_x, grad, config.ls_model_free);
    log.trials(ls, x, Regime::ModelFree);
    StepRecord rec;
    rec.regime = Regime::ModelFree;
    rec.x = x;
    rec.f_x = f_x;
    rec.evals = ls.evals_used;
    if (!ls.succeeded()) {
      rec.x_next = x;
      rec.f_next = f_x;
      trace.steps.push_back(std::move(rec));
      log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::LineSearchFail);
      finish(trace, obj, start_count, x, f_x, log.error_at(x), false, "model-free line search failed");
      return trace;
    }
    rec.eta = ls.eta;
    rec.x_next = ls.accepted_point;
    rec.f_next = ls.f_at_accepted;
    trace.steps.push_back(std::move(rec));

    state.ebar = config.lipschitz_residual * distance(ls.accepted_point, x);
    x = std::move(ls.accepted_point);
    f_x = ls.f_at_accepted;
    log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::Accept);
    if (log.reached(x)) {
      finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
      return trace;
    }
  }
  finish(trace, obj, start_count, x, f_x, log.error_at(x), false, "outer iteration limit reached");
  return trace;
}

ConvergenceTrace model_free_solve(CompositeObjective& obj, std::span<const double> x0, const GcConfig& config) {
  config.validate();
  ConvergenceTrace trace;
  Log log(obj, config, trace);
  const std::uint64_t start_count = obj.evaluations();
  Vector x(x0.begin(), x0.end());
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  if (log.reached(x)) {
    finish(trace, obj, start_count, x, kNaN, log.error_at(x), true, {});
    return trace;
  }

  double f_x = obj.eval(x);
  log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::Start);

  for (std::size_t outer = 1; outer <= config.max_outer_iters; ++outer) {
    trace.outer_iterations = outer;
    const ExactGradient g = obj.exact_gradient(x, f_x);
    log.gradient(g, log.error_with_gradient(x, g.gradient), Regime::ModelFree);
    if (gradient_small(config, g.gradient)) {
      finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
      return trace;
    }

    LineSearchOutcome ls = bt_line_search(obj, x, f_x, g.gradient, config.ls_model_free);
    log.trials(ls, x, Regime::ModelFree);
    StepRecord rec;
    rec.regime = Regime::ModelFree;
    rec.x = x;
    rec.f_x = f_x;
    rec.evals = ls.evals_used;
    if (!ls.succeeded()) {
      rec.x_next = x;
      rec.f_next = f_x;
      trace.steps.push_back(std::move(rec));
      log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::LineSearchFail);
      finish(trace, obj, start_count, x, f_x, log.error_at(x), false, "model-free line search failed");
      return trace;
    }
    rec.eta = ls.eta;
    rec.x_next = ls.accepted_point;
    rec.f_next = ls.f_at_accepted;
    trace.steps.push_back(std::move(rec));

    x = std::move(ls.accepted_point);
    f_x = ls.f_at_accepted;
    log.row(f_x, log.error_at(x), Regime::ModelFree, TraceEvent::Accept);
    if (log.reached(x)) {
      finish(trace, obj, start_count, x, f_x, log.error_at(x), true, {});
      return trace;
    }
  }
  finish(trace, obj, start_count, x, f_x, log.error_at(x), false, "outer iteration limit reached");
  return trace;
}

}  // namespace gradcomp
