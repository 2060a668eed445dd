#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradcomp/composite.hpp"
#include "gradcomp/matrix.hpp"
#include "gradcomp/rng.hpp"

namespace gradcomp {

/// States whose norm passes this are treated as a diverged rollout.
inline constexpr double kDivergenceThreshold = 1e12;

/**
 * Linear dynamics plus a small state nonlinearity,
 *   x_{t+1} = A x_t + B u_t + h(x_t),   h(x)ᵢ = ℓ·xᵢ / (1 − 0.9·sin xᵢ),
 * under linear feedback u = −K x, with the cost Σ_{t=0}^{T} xᵀQc x + uᵀRc u
 * averaged over a fixed set of initial states.
 */
struct LqrInstance {
  std::size_t n = 0;
  std::size_t p = 0;
  Matrix A;
  Matrix B;
  Matrix Qc;
  Matrix Rc;
  /// Only the x-only family is implemented.
  std::string h_family = "scaled-sine-rational";
  double ell = 0.01;
  std::size_t T = 50;
  double sampling_radius = 1e-3;
  std::vector<Vector> initial_states;
  Matrix K_hat_star;
  std::optional<Matrix> K_star_ref;
  std::uint64_t seed = 0;

  /// Number of gain entries, p·n.
  std::size_t dim() const noexcept { return p * n; }
};

Vector h_eval(const LqrInstance& inst, std::span<const double> x);

struct Rollout {
  std::vector<Vector> states;  // x₀ … x_{T+1}
  std::vector<Vector> inputs;  // u₀ … u_T
  double cost = 0.0;
};

/// Throws Diverged when a state norm exceeds kDivergenceThreshold.
Rollout rollout(const LqrInstance& inst, const Matrix& k, std::span<const double> x0);

/// Mean rollout cost over the initial states, uncounted. Throws Diverged.
double mean_cost(const LqrInstance& inst, const Matrix& k);

/// mean_cost plus exactly one counter increment, charged even when the
/// rollout diverges.
double empirical_cost(const LqrInstance& inst, const Matrix& k, EvalCounter& counter);

enum class ZerothOrderScheme { PaperOnePoint, CentralDifference };

struct ZerothOrderGradient {
  Matrix G;
  std::uint64_t evals = 0;
};

/// PaperOnePoint: Gᵢⱼ = C(K + r_s·Eᵢⱼ)/r_s, d evaluations.
/// CentralDifference: Gᵢⱼ = (C(K + r_s·Eᵢⱼ) − C(K − r_s·Eᵢⱼ))/(2r_s), 2d evaluations.
ZerothOrderGradient zeroth_order_grad(const LqrInstance& inst, const Matrix& k, EvalCounter& counter,
                                      ZerothOrderScheme scheme = ZerothOrderScheme::CentralDifference);

struct LqrGradientWorkspace {
  Matrix A_K;
  Matrix P_K;
  Matrix Sigma_K;
  Matrix E_K;
};

/// Σ₀ = (1/N)·Σ x₀x₀ᵀ over the initial states.
Matrix initial_covariance(const LqrInstance& inst);

/**
 * Gradient of the infinite-horizon linear cost, 2·E_K·Σ_K with
 *   E_K = (Rc + BᵀP_K B)K − BᵀP_K A,
 *   P_K = A_KᵀP_K A_K + Qc + KᵀRcK,   Σ_K = Σ₀ + A_K Σ_K A_Kᵀ.
 * Throws SpectralRadiusError when A − BK is not Schur stable.
 */
Matrix model_gradient(const LqrInstance& inst, const Matrix& k, LqrGradientWorkspace* ws = nullptr);

/// (1/N)·Σ x₀ᵀP_K x₀, the infinite-horizon cost of the linear part.
double model_cost(const LqrInstance& inst, const Matrix& k);

struct LqrOptions {
  std::size_t n = 4;
  std::size_t p = 3;
  double ell = 0.01;
  std::size_t T = 50;
  double sampling_radius = 1e-3;
};

/// Gaussian A and B, Qc = 2I, Rc = I, basis initial states and K̂⋆ from the
/// Riccati equation. Draws are repeated (up to 50 times) while the Riccati
/// solve fails or a rollout under K̂⋆ diverges; then GenerationFailed.
LqrInstance make_lqr(Rng& rng, const LqrOptions& options = {});

/// Fills K_hat_star from the Riccati equation.
void solve_model_optimum(LqrInstance& inst);

std::unique_ptr<CompositeObjective> lqr_objective(const LqrInstance& inst,
                                                  ZerothOrderScheme scheme = ZerothOrderScheme::CentralDifference);

/// Model-free gradient descent from K̂⋆ until ‖∇C‖_F < tol, with
/// central-difference gradients. Stores the result in inst.K_star_ref.
/// Throws NotConverged.
Matrix reference_optimum(LqrInstance& inst, double tol = 1e-4, std::size_t max_iters = 200000);

/// Row-major flattening of a p×n gain.
Vector flatten(const Matrix& k);
Matrix unflatten(std::span<const double> x, std::size_t p, std::size_t n);

}  // namespace gradcomp
