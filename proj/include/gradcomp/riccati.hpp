#pragma once

#include <cstddef>

#include "gradcomp/matrix.hpp"

namespace gradcomp {

inline constexpr double kLyapunovTol = 1e-12;
inline constexpr double kRiccatiTol = 1e-10;
inline constexpr std::size_t kSolverMaxIter = 100000;

/**
 * Solves the discrete Lyapunov equation  AclᵀXAcl − X + W = 0.
 *
 * Runs the fixed point X ← AclᵀXAcl + W from X₀ = W, accelerated by
 * doubling (X ← X + AₖᵀXAₖ, Aₖ₊₁ = Aₖ²) and then polished with plain
 * fixed-point sweeps until ‖AclᵀXAcl − X + W‖_F ≤ tol. The returned X is
 * exactly symmetric when W is.
 *
 * For the covariance form Σ = Σ₀ + AΣAᵀ pass Acl = Aᵀ.
 *
 * Throws SpectralRadiusError when the iterates blow up (Acl not Schur
 * stable) and NotConverged when the residual stays above tol.
 */
Matrix solve_discrete_lyapunov(const Matrix& acl, const Matrix& w, double tol = kLyapunovTol,
                               std::size_t max_iter = kSolverMaxIter);

/// ‖AclᵀXAcl − X + W‖_F
double lyapunov_residual(const Matrix& acl, const Matrix& x, const Matrix& w);

struct DareSolution {
  Matrix P;
  Matrix K;  // optimal gain, u = −K x
};

/// One application of the Riccati map Q + AᵀPA − AᵀPB(R + BᵀPB)⁻¹BᵀPA.
Matrix riccati_step(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, const Matrix& p);

/// (R + BᵀPB)⁻¹BᵀPA
Matrix riccati_gain(const Matrix& a, const Matrix& b, const Matrix& r, const Matrix& p);

/**
 * Discrete algebraic Riccati equation by value iteration from P = Q, stopped
 * when successive iterates differ by ≤ tol in Frobenius norm.
 *
 * Throws NotConverged, or NotStabilizable when the iteration blows up or
 * A − B·K is not Schur stable at the fixed point.
 */
DareSolution solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                        double tol = kRiccatiTol, std::size_t max_iter = kSolverMaxIter);

}  // namespace gradcomp
