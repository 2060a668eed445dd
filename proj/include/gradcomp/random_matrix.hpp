#pragma once

#include <cstddef>

#include "gradcomp/matrix.hpp"
#include "gradcomp/rng.hpp"

namespace gradcomp {

/// i.i.d. standard-normal entries, drawn in row-major order.
Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols);

/// P = MᵀM for a Gaussian M, redrawn until λ_min(P) > 1e-8.
/// Throws GenerationFailed after 100 draws.
Matrix random_spd(Rng& rng, std::size_t n);

/// Q = V·diag(λ)·Vᵀ with V orthogonal (Gram-Schmidt on a Gaussian matrix)
/// and λ uniform on (0, radius], the largest one then pinned to radius.
Matrix random_spd_with_spectral_radius(Rng& rng, std::size_t n, double radius);

/// Orthonormalizes the columns of a square matrix (modified Gram-Schmidt,
/// two passes). Throws Error if the columns are numerically dependent.
Matrix orthonormalize_columns(const Matrix& m);

}  // namespace gradcomp
