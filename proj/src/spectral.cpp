#include "gradcomp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradcomp/error.hpp"
#include "gradcomp/rng.hpp"

namespace gradcomp {
namespace {

struct Tridiagonal {
  Vector diag;
  Vector off;  // off[i] couples i and i+1
};

Tridiagonal tridiagonalize(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix a = symmetric_part(s);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    Vector v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    const double xnorm = norm2(v);
    if (xnorm == 0.0) continue;
    const double alpha = v[0] > 0.0 ? -xnorm : xnorm;
    v[0] -= alpha;
    const double vv = dot(v, v);
    if (vv == 0.0) continue;
    const double beta = 2.0 / vv;

    // Trailing block S <- H S H with H = I - beta v vᵀ.
    Vector p(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = beta * acc;
    }
    const double half = 0.5 * beta * dot(p, v);
    Vector w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - half * v[i];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(k + 1 + i, k + 1 + j) -= v[i] * w[j] + w[i] * v[j];

    a(k + 1, k) = alpha;
    a(k, k + 1) = alpha;
    for (std::size_t i = 1; i < m; ++i) {
      a(k + 1 + i, k) = 0.0;
      a(k, k + 1 + i) = 0.0;
    }
  }
  Tridiagonal t;
  t.diag.resize(n);
  t.off.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) t.off[i] = a(i + 1, i);
  return t;
}

// Number of eigenvalues strictly below x.
std::size_t sturm_count(const Tridiagonal& t, double x) {
  constexpr double kTiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.diag.size(); ++i) {
    if (q == 0.0) q = kTiny;
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

Vector symmetric_eigenvalues(const Matrix& s) {
  if (!s.is_square()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  const std::size_t n = s.rows();
  if (n == 0) return {};
  const Tridiagonal t = tridiagonalize(s);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double pad = 1e-12 * std::max({std::abs(lo), std::abs(hi), 1.0});
  lo -= pad;
  hi += pad;

  Vector eig(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo;
    double b = hi;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(t, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    eig[k] = 0.5 * (a + b);
  }
  return eig;
}

double min_eigenvalue(const Matrix& s) { return symmetric_eigenvalues(s).front(); }
double max_eigenvalue(const Matrix& s) { return symmetric_eigenvalues(s).back(); }

namespace {

double gelfand_radius(const Matrix& m) {
  // ρ(M) = lim ‖M^k‖^(1/k); track log scale so powers never overflow.
  Matrix power = m;
  double log_scale = 0.0;  // log of the factor removed from M^(2^j)
  double exponent = 1.0;   // 2^j
  double estimate = frobenius_norm(m);
  for (int j = 0; j < 60; ++j) {
    const double nrm = frobenius_norm(power);
    if (nrm == 0.0) return 0.0;
    const double next = std::exp((log_scale + std::log(nrm)) / exponent);
    if (j > 4 && std::abs(next - estimate) <= 1e-15 * next) return next;
    estimate = next;
    power *= 1.0 / nrm;
    log_scale = 2.0 * (log_scale + std::log(nrm));
    power = power * power;
    exponent *= 2.0;
  }
  return estimate;
}

}  // namespace

double spectral_radius(const Matrix& m, double tol, std::size_t max_iter) {
  if (!m.is_square()) throw std::invalid_argument("spectral_radius: matrix not square");
  if (!m.all_finite()) throw NotConverged("spectral_radius: non-finite matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 0.0;
  const double mnorm = frobenius_norm(m);
  if (mnorm == 0.0) return 0.0;

  Rng rng(0x5eedf00dULL);
  Vector v(n);
  for (double& x : v) x = rng.normal();
  const double v0 = norm2(v);
  for (double& x : v) x /= v0;

  double previous = -1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector mv = m * v;
    const double growth = norm2(mv);
    if (growth == 0.0) break;  // v hit the null space; let the fallback decide
    const double theta = dot(v, mv);
    Vector residual = axpy_neg(mv, theta, v);
    const bool eigvec = norm2(residual) <= std::sqrt(tol) * mnorm;
    if (eigvec && previous > 0.0 && std::abs(growth - previous) <= tol * growth) {
      return std::abs(theta);
    }
    previous = growth;
    for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / growth;
  }
  return gelfand_radius(m);
}

}  // namespace gradcomp
