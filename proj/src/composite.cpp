#include "gradcomp/composite.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gradcomp/error.hpp"

namespace gradcomp {

GradientScheme forward_difference(double step) {
  if (!(step > 0.0)) throw std::invalid_argument("forward_difference: step must be positive");
  return [step](std::span<const double> x, double f_x, const Evaluator& eval) {
    Vector g(x.size());
    Vector probe(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
      probe[j] = x[j] + step;
      g[j] = (eval(probe) - f_x) / step;
      probe[j] = x[j];
    }
    return g;
  };
}

GradientScheme central_difference(double step) {
  if (!(step > 0.0)) throw std::invalid_argument("central_difference: step must be positive");
  return [step](std::span<const double> x, double /*f_x*/, const Evaluator& eval) {
    Vector g(x.size());
    Vector probe(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
      probe[j] = x[j] + step;
      const double plus = eval(probe);
      probe[j] = x[j] - step;
      const double minus = eval(probe);
      probe[j] = x[j];
      g[j] = (plus - minus) / (2.0 * step);
    }
    return g;
  };
}

GradientScheme one_point(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("one_point: radius must be positive");
  return [radius](std::span<const double> x, double /*f_x*/, const Evaluator& eval) {
    const double d = static_cast<double>(x.size());
    Vector g(x.size(), 0.0);
    Vector probe(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
      probe[j] = x[j] + radius;
      const double c = eval(probe);
      probe[j] = x[j];
      // (1/d)·(d/r²)·C_j·U_j with U_j = r·e_j
      g[j] += (1.0 / d) * (d / (radius * radius)) * c * radius;
    }
    return g;
  };
}

CompositeObjective::CompositeObjective(std::size_t dim, ValueFn value, GradientFn model_gradient,
                                       GradientScheme exact_scheme)
    : dim_(dim),
      value_(std::move(value)),
      model_gradient_(std::move(model_gradient)),
      exact_scheme_(std::move(exact_scheme)) {
  if (dim_ == 0 || !value_ || !model_gradient_ || !exact_scheme_) {
    throw std::invalid_argument("CompositeObjective: incomplete definition");
  }
}

double CompositeObjective::eval(std::span<const double> x) {
  counter_.increment();
  return value_(x);
}

ExactGradient CompositeObjective::exact_gradient(std::span<const double> x, double f_x) {
  ExactGradient out;
  if (use_oracle_) {
    out.gradient = oracle_gradient_(x);
    out.oracle_mode = true;
    return out;
  }
  const std::uint64_t before = counter_.count();
  const Evaluator eval = [this, &out](std::span<const double> p) {
    const double v = this->eval(p);
    out.samples.push_back(v);
    return v;
  };
  out.gradient = exact_scheme_(x, f_x, eval);
  out.evals = counter_.count() - before;
  if (!all_finite(out.samples) || !all_finite(out.gradient)) {
    throw Diverged("exact gradient: a probed point produced a non-finite objective value");
  }
  return out;
}

Vector CompositeObjective::model_gradient(std::span<const double> x) const { return model_gradient_(x); }

std::optional<double> CompositeObjective::model_value(std::span<const double> x) const {
  if (!model_value_) return std::nullopt;
  return model_value_(x);
}

void CompositeObjective::use_oracle_gradient(bool on) {
  if (on && !oracle_gradient_) {
    throw std::logic_error("CompositeObjective: no oracle gradient attached");
  }
  use_oracle_ = on;
}

Compensation compensate(CompositeObjective& obj, std::span<const double> x_tilde, double f_tilde) {
  Compensation c;
  c.exact = obj.exact_gradient(x_tilde, f_tilde);
  c.delta = subtract(c.exact.gradient, obj.model_gradient(x_tilde));
  return c;
}

Vector compensated_gradient(const CompositeObjective& obj, const CompensationState& state,
                            std::span<const double> x) {
  return add(obj.model_gradient(x), state.delta);
}

CompensationState ebar_update(CompensationState state, std::span<const double> x_prev,
                              std::span<const double> x_next) {
  state.ebar += state.lipschitz_residual * distance(x_next, x_prev);
  return state;
}

bool monitor_ok(const CompensationState& state, std::span<const double> gtilde) {
  const double gnorm = norm2(gtilde);
  if (gnorm == 0.0) return false;
  return state.ebar <= ((1.0 - state.gamma) / state.gamma) * gnorm;
}

}  // namespace gradcomp
