#include "gradcomp/random_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradcomp/error.hpp"
#include "gradcomp/spectral.hpp"

namespace gradcomp {

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("gaussian_matrix: empty shape");
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.normal();
  return m;
}

Matrix random_spd(Rng& rng, std::size_t n) {
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix p = gram(gaussian_matrix(rng, n, n));
    if (min_eigenvalue(p) > 1e-8) return p;
  }
  throw GenerationFailed("random_spd: no positive definite draw in 100 attempts");
}

Matrix orthonormalize_columns(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix q = m;
  for (std::size_t j = 0; j < cols; ++j) {
    const double original = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += q(i, j) * q(i, j);
      return std::sqrt(s);
    }();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < rows; ++i) proj += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < rows; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm <= 1e-10 * original || nrm == 0.0) {
      throw Error("orthonormalize_columns: columns are numerically dependent");
    }
    for (std::size_t i = 0; i < rows; ++i) q(i, j) /= nrm;
  }
  return q;
}

Matrix random_spd_with_spectral_radius(Rng& rng, std::size_t n, double radius) {
  if (n == 0) throw std::invalid_argument("random_spd_with_spectral_radius: n must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("random_spd_with_spectral_radius: radius must be positive");

  Matrix v;
  for (int attempt = 0;; ++attempt) {
    try {
      v = orthonormalize_columns(gaussian_matrix(rng, n, n));
      break;
    } catch (const Error&) {
      if (attempt >= 100) throw GenerationFailed("random_spd_with_spectral_radius: degenerate draws");
    }
  }

  Vector lambda(n);
  for (double& l : lambda) l = radius * rng.uniform_positive();
  *std::max_element(lambda.begin(), lambda.end()) = radius;

  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * lambda[k] * v(j, k);
      q(i, j) = s;
      q(j, i) = s;
    }
  }
  return q;
}

}  // namespace gradcomp
