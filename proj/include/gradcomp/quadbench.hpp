#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "gradcomp/composite.hpp"
#include "gradcomp/matrix.hpp"
#include "gradcomp/rng.hpp"

namespace gradcomp {

/**
 * f(x) = c1·xᵀPx/2 + c2·(x − c3)ᵀQ(x − c3)/2 with model part f̂ = c1·xᵀPx/2.
 *
 * Immutable once built. x_star solves (c1·P + c2·Q)x = c2·Q·c3.
 */
struct QuadraticInstance {
  std::size_t n = 0;
  Matrix P;
  Matrix Q;
  double c1 = 1.0;
  double c2 = 0.1;
  Vector c3;
  Vector x_star;
  Vector x_hat_star;
  /// Lipschitz constant of ∇r, c2·λ_max(Q).
  double lr_true = 0.0;
  std::uint64_t seed = 0;

  /// Fills x_star, x_hat_star and lr_true from P, Q, c1, c2, c3.
  static QuadraticInstance from_matrices(Matrix p, Matrix q, double c1, double c2, Vector c3,
                                         std::uint64_t seed = 0);

  /// c1·P + c2·Q
  Matrix hessian() const;
  double value(std::span<const double> x) const;
  double model_value(std::span<const double> x) const;
  double residual_value(std::span<const double> x) const;
  Vector gradient(std::span<const double> x) const;
  Vector model_gradient(std::span<const double> x) const;
  Vector residual_gradient(std::span<const double> x) const;
  double f_star() const { return value(x_star); }
  /// Strong convexity constant λ_min(c1·P + c2·Q).
  double mu() const;
  /// Smoothness constant λ_max(c1·P + c2·Q).
  double smoothness() const;
};

/// P from random_spd, Q from random_spd_with_spectral_radius; c3 broadcast
/// to a constant vector.
QuadraticInstance make_quadratic(Rng& rng, std::size_t n = 4, double c1 = 1.0, double c2 = 0.1, double c3 = 0.1,
                                 double spectral_radius_q = 10.0);

enum class QuadScheme { ForwardDifference, CentralDifference };

struct QuadObjectiveOptions {
  QuadScheme scheme = QuadScheme::ForwardDifference;
  double fd_step = 1e-6;
  /// Answer exact-gradient requests analytically and without counting.
  bool analytic = false;
};

std::unique_ptr<CompositeObjective> quad_objective(const QuadraticInstance& inst, QuadObjectiveOptions options = {});

}  // namespace gradcomp
