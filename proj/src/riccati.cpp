#include "gradcomp/riccati.hpp"

#include <cmath>
#include <stdexcept>

#include "gradcomp/error.hpp"
#include "gradcomp/spectral.hpp"

namespace gradcomp {
namespace {

// Iterates this large relative to W mean the series Σ (Aᵗ)ᵀWAᵗ diverges.
constexpr double kBlowUp = 1e6;

Matrix congruence(const Matrix& a, const Matrix& x) {
  return symmetric_part(a.transpose() * x * a);
}

void check_shapes(const Matrix& acl, const Matrix& w) {
  if (!acl.is_square() || !w.is_square() || acl.rows() != w.rows()) {
    throw std::invalid_argument("solve_discrete_lyapunov: shape mismatch");
  }
}

}  // namespace

double lyapunov_residual(const Matrix& acl, const Matrix& x, const Matrix& w) {
  return frobenius_norm(acl.transpose() * x * acl - x + w);
}

Matrix solve_discrete_lyapunov(const Matrix& acl, const Matrix& w, double tol, std::size_t max_iter) {
  check_shapes(acl, w);
  const double wnorm = frobenius_norm(w);
  const double limit = kBlowUp * std::max(wnorm, 1.0);

  Matrix x = symmetric_part(w);
  Matrix ak = acl;
  std::size_t iter = 0;

  // Doubling: after k steps X = Σ_{t < 2^k} (Aᵗ)ᵀ W Aᵗ.
  for (; iter < max_iter && iter < 64; ++iter) {
    const Matrix increment = congruence(ak, x);
    x += increment;
    if (!x.all_finite() || frobenius_norm(x) > limit) {
      throw SpectralRadiusError("solve_discrete_lyapunov: iterates diverge (closed loop not stable)");
    }
    if (frobenius_norm(increment) <= 0.1 * tol) break;
    ak = ak * ak;
    if (!ak.all_finite()) {
      throw SpectralRadiusError("solve_discrete_lyapunov: closed-loop powers overflow");
    }
  }

  double residual = lyapunov_residual(acl, x, w);
  for (; residual > tol && iter < max_iter; ++iter) {
    x = congruence(acl, x) + w;
    x = symmetric_part(x);
    if (!x.all_finite() || frobenius_norm(x) > limit) {
      throw SpectralRadiusError("solve_discrete_lyapunov: iterates diverge (closed loop not stable)");
    }
    residual = lyapunov_residual(acl, x, w);
  }
  if (residual > tol) {
    throw NotConverged("solve_discrete_lyapunov: residual " + std::to_string(residual) +
                       " above tolerance");
  }
  return x;
}

Matrix riccati_gain(const Matrix& a, const Matrix& b, const Matrix& r, const Matrix& p) {
  const Matrix bt = b.transpose();
  const Matrix btp = bt * p;
  return solve(r + btp * b, btp * a);
}

Matrix riccati_step(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, const Matrix& p) {
  const Matrix at_p = a.transpose() * p;
  const Matrix gain = riccati_gain(a, b, r, p);
  return symmetric_part(q + at_p * a - at_p * b * gain);
}

DareSolution solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, double tol,
                        std::size_t max_iter) {
  if (!a.is_square() || b.rows() != a.rows() || q.rows() != a.rows() || !q.is_square() ||
      !r.is_square() || r.rows() != b.cols()) {
    throw std::invalid_argument("solve_dare: shape mismatch");
  }
  Matrix p = symmetric_part(q);
  bool converged = false;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    Matrix next = riccati_step(a, b, q, r, p);
    if (!next.all_finite()) throw NotStabilizable("solve_dare: Riccati iterates overflow");
    const double change = frobenius_norm(next - p);
    p = std::move(next);
    if (change <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NotConverged("solve_dare: no fixed point within the iteration budget");

  Matrix k = riccati_gain(a, b, r, p);
  if (spectral_radius(a - b * k) >= 1.0) {
    throw NotStabilizable("solve_dare: A - B K is not Schur stable");
  }
  return {std::move(p), std::move(k)};
}

}  // namespace gradcomp
