#pragma once

#include <cstddef>

#include "gradcomp/matrix.hpp"

namespace gradcomp {

/// Eigenvalues of a symmetric matrix in ascending order (Householder
/// tridiagonalization followed by Sturm-sequence bisection). Only the
/// upper triangle is read.
Vector symmetric_eigenvalues(const Matrix& s);

double min_eigenvalue(const Matrix& s);
double max_eigenvalue(const Matrix& s);

/**
 * Largest eigenvalue magnitude of a square matrix.
 *
 * Power iteration from a fixed pseudo-random start. The iteration is only
 * trusted once the iterate is an approximate eigenvector (small residual
 * ‖Mv − θv‖); when the dominant eigenvalues form a complex pair or the
 * iteration stalls, the estimate falls back to the Gelfand limit
 * ‖M^(2^k)‖^(1/2^k) computed by normalized repeated squaring. The fallback
 * is an upper estimate that is in practice accurate to many digits for
 * small matrices.
 *
 * Throws NotConverged only if the matrix contains non-finite values.
 */
double spectral_radius(const Matrix& m, double tol = 1e-10, std::size_t max_iter = 5000);

}  // namespace gradcomp
