#include "gradcomp/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "gradcomp/error.hpp"
#include "gradcomp/spectral.hpp"

namespace gradcomp {
namespace {

double model_based_factor(const RateDiagnostics& d) {
  return 1.0 - 2.0 * d.mu * d.alpha * d.gamma * d.gamma * d.eta_min;
}

}  // namespace

double prop2_bound(const RateDiagnostics& d, std::uint64_t n, double gap0) {
  if (gap0 < 0.0) throw std::invalid_argument("prop2_bound: negative gap");
  const double factor = std::max(model_based_factor(d), 0.0);
  return std::pow(factor, static_cast<double>(n)) * gap0;
}

std::uint64_t nmin_bound(const RateDiagnostics& d) {
  if (!(d.kappa_min > 0.0 && d.kappa_min < 1.0) || !(d.kappa_max > d.kappa_min)) {
    throw std::invalid_argument("nmin_bound: need 0 < kappa_min < 1 and kappa_max > kappa_min");
  }
  if (!(d.gamma > 0.0 && d.gamma < 1.0) || !(d.eta_max > 0.0) || !(d.L_r > 0.0)) {
    throw std::invalid_argument("nmin_bound: need gamma in (0,1), eta_max > 0, L_r > 0");
  }
  const double budget = std::log((1.0 - d.gamma) / (d.gamma * d.eta_max * d.L_r));
  const double shrink = std::log(1.0 / d.kappa_min);
  const bool unit = d.kappa_max == 1.0;

  auto holds = [&](std::uint64_t n) {
    const double nn = static_cast<double>(n);
    if (unit) return std::log(nn) + nn * shrink <= budget;
    const double lhs = std::log(std::abs(std::pow(d.kappa_max, nn) - 1.0)) + nn * shrink;
    return lhs <= budget + std::log(std::abs(d.kappa_max - 1.0));
  };

  std::uint64_t n = 0;
  while (holds(n + 1)) ++n;
  return n;
}

KappaBounds bounded_direction_constants(const Matrix& p, double eta_min, double eta_max) {
  if (!(eta_max > eta_min) || eta_min < 0.0) {
    throw std::invalid_argument("bounded_direction_constants: need 0 <= eta_min < eta_max");
  }
  const Vector eig = symmetric_eigenvalues(p);
  if (eig.front() <= 0.0) throw std::invalid_argument("bounded_direction_constants: P not positive definite");
  KappaBounds k{1.0 - eta_max * eig.back(), 1.0 - eta_min * eig.front()};
  if (k.kappa_min <= 0.0) {
    throw InvalidRegime("bounded_direction_constants: eta_max * lambda_max(P) >= 1");
  }
  return k;
}

ProgressRates progress_per_eval(const RateDiagnostics& d, std::uint64_t m_max, std::uint64_t n) {
  const double mb = model_based_factor(d);
  const double mf = 1.0 - d.mu / d.L_f;
  if (!(mb > 0.0 && mb < 1.0) || !(mf > 0.0 && mf < 1.0) || m_max == 0 || n == 0) {
    throw std::invalid_argument("progress_per_eval: rate factors must lie in (0, 1)");
  }
  return {std::abs(std::log(mb)) / static_cast<double>(m_max), std::abs(std::log(mf)) / static_cast<double>(n)};
}

}  // namespace gradcomp
