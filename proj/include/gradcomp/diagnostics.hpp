#pragma once

#include <cstdint>

#include "gradcomp/matrix.hpp"

namespace gradcomp {

/// Analysis constants. None of these are needed to run the solver; they
/// feed the rate and budget formulas below and the tests that check them.
struct RateDiagnostics {
  double mu = 1.0;          // PL constant of f
  double L_f = 1.0;         // smoothness of f
  double kappa_min = 0.5;   // bounded-update-direction constants
  double kappa_max = 0.9;
  double alpha = 0.3;
  double gamma = 0.5;
  double eta_min = 0.005;
  double eta_max = 1.0;
  double L_r = 0.1;
};

/// Geometric bound on the suboptimality gap after N model-based steps:
/// (1 − 2μαγ²η_min)^N · gap0, with the factor clamped at 0.
double prop2_bound(const RateDiagnostics& d, std::uint64_t n, double gap0);

/**
 * Largest N for which successful line searches are still guaranteed to give
 * sufficient decrease:
 *   κ_max ≠ 1:  log|κ_maxᴺ − 1| + N·log(1/κ_min) ≤ log((1−γ)/(γ·η_max·L_r)) + log|κ_max − 1|
 *   κ_max = 1:  log N + N·log(1/κ_min)          ≤ log((1−γ)/(γ·η_max·L_r))
 * Both left-hand sides increase with N, so a forward scan finds it. Returns
 * 0 when N = 1 already fails. Requires κ_min ∈ (0,1), κ_max > κ_min, L_r > 0.
 */
std::uint64_t nmin_bound(const RateDiagnostics& d);

struct KappaBounds {
  double kappa_min;
  double kappa_max;
};

/// For g̃(x) = P·x + δ: κ_max = 1 − η_min·λ_min(P), κ_min = 1 − η_max·λ_max(P).
/// Throws InvalidRegime when κ_min ≤ 0.
KappaBounds bounded_direction_constants(const Matrix& p, double eta_min, double eta_max);

struct ProgressRates {
  double model_based;  // |log(1 − 2μαγ²η_min)| / m_max
  double model_free;   // |log(1 − μ/L_f)| / n
};

ProgressRates progress_per_eval(const RateDiagnostics& d, std::uint64_t m_max, std::uint64_t n);

}  // namespace gradcomp
