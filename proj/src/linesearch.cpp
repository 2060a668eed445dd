#include "gradcomp/linesearch.hpp"

#include <stdexcept>

namespace gradcomp {

void LineSearchParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("line search: alpha must lie in (0, 1/2]");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("line search: beta must lie in (0, 1)");
  if (!(eta_min >= 0.0)) throw std::invalid_argument("line search: eta_min must be non-negative");
  if (!(eta_max > eta_min)) throw std::invalid_argument("line search: eta_max must exceed eta_min");
}

LineSearchOutcome bt_line_search(CompositeObjective& obj, std::span<const double> x, double f_x,
                                 std::span<const double> direction, const LineSearchParams& params) {
  params.validate();
  const double slope = dot(direction, direction);
  LineSearchOutcome out;

  double eta = params.eta_max;
  for (int shrinks = 0;; ++shrinks) {
    Vector trial = axpy_neg(x, eta, direction);
    const double f_trial = obj.eval(trial);
    ++out.evals_used;
    out.trials.push_back({eta, f_trial});

    const bool decreased = slope == 0.0 || f_trial < f_x;
    if (decreased && f_trial <= f_x - params.alpha * eta * slope) {
      out.eta = eta;
      out.accepted_point = std::move(trial);
      out.f_at_accepted = f_trial;
      return out;
    }
    if (eta > params.eta_min && shrinks < kMaxHalvings) {
      eta *= params.beta;
      continue;
    }
    out.eta = 0.0;
    out.accepted_point.assign(x.begin(), x.end());
    out.f_at_accepted = f_x;
    return out;
  }
}

std::uint64_t m_max(const LineSearchParams& params) {
  params.validate();
  if (params.eta_min == 0.0) return kMaxHalvings + 1;
  std::uint64_t m = 1;
  double eta = params.eta_max;
  while (eta > params.eta_min && m <= static_cast<std::uint64_t>(kMaxHalvings)) {
    eta *= params.beta;
    ++m;
  }
  return m;
}

}  // namespace gradcomp
