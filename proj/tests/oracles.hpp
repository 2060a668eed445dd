// Reference computations for tests. Each one takes a different route from
// the library code it is compared against.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradcomp/lqrenv.hpp"
#include "gradcomp/matrix.hpp"

namespace oracle {

using gradcomp::Matrix;
using gradcomp::Vector;

/// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues ascending.
inline Vector jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline Matrix matpow(const Matrix& a, int k) {
  Matrix r = Matrix::identity(a.rows());
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

/// Gradient of the T-horizon linear cost (1/N)·Σ_{x₀} Σ_{t=0}^{T} x_tᵀ(Q + KᵀRK)x_t
/// with x_{t+1} = (A − BK)x_t, summed stage by stage:
///   2·Σ_s [RK − BᵀV_{T−s−1}A_K]·x_s x_sᵀ,  V_m = Σ_{k=0}^{m} (A_Kᵏ)ᵀ M A_Kᵏ, V_{−1} = 0.
inline Matrix finite_horizon_gradient(const gradcomp::LqrInstance& inst, const Matrix& k) {
  const Matrix acl = inst.A - inst.B * k;
  const Matrix m = inst.Qc + k.transpose() * inst.Rc * k;
  const std::size_t horizon = inst.T;
  std::vector<Matrix> v(horizon + 1, Matrix(inst.n, inst.n));  // v[m] = V_m
  Matrix power = Matrix::identity(inst.n);
  Matrix acc(inst.n, inst.n);
  for (std::size_t i = 0; i <= horizon; ++i) {
    acc += power.transpose() * m * power;
    v[i] = acc;
    power = power * acl;
  }
  Matrix g(inst.p, inst.n);
  for (const Vector& x0 : inst.initial_states) {
    Vector x = x0;
    for (std::size_t s = 0; s <= horizon; ++s) {
      Matrix coef = inst.Rc * k;
      if (s < horizon) coef -= inst.B.transpose() * v[horizon - s - 1] * acl;
      const Matrix xx = Matrix::column(x) * Matrix::column(x).transpose();
      g += 2.0 * (coef * xx);
      x = acl * x;
    }
  }
  g *= 1.0 / static_cast<double>(inst.initial_states.size());
  return g;
}

/// Infinite-horizon linear cost by summing the closed-loop series directly.
inline double series_cost(const gradcomp::LqrInstance& inst, const Matrix& k, int terms = 5000) {
  const Matrix acl = inst.A - inst.B * k;
  const Matrix m = inst.Qc + k.transpose() * inst.Rc * k;
  double total = 0.0;
  for (const Vector& x0 : inst.initial_states) {
    Vector x = x0;
    for (int t = 0; t < terms; ++t) {
      total += gradcomp::dot(x, m * x);
      x = acl * x;
    }
  }
  return total / static_cast<double>(inst.initial_states.size());
}

}  // namespace oracle
