#include "gradcomp/lqrenv.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradcomp/error.hpp"
#include "gradcomp/random_matrix.hpp"
#include "gradcomp/riccati.hpp"
#include "gradcomp/solver.hpp"
#include "gradcomp/spectral.hpp"

namespace gradcomp {
namespace {

constexpr int kMaxGenerationAttempts = 50;

double h_component(double ell, double xi) { return ell * xi / (1.0 - 0.9 * std::sin(xi)); }

void check_gain(const LqrInstance& inst, const Matrix& k) {
  if (k.rows() != inst.p || k.cols() != inst.n) throw std::invalid_argument("lqr: gain must be p x n");
}

// Runs one rollout. Fills `out` when given; the cost is accumulated in the
// same order either way so both entry points agree bit for bit.
double simulate(const LqrInstance& inst, const Matrix& k, std::span<const double> x0, Rollout* out) {
  const std::size_t n = inst.n;
  const std::size_t p = inst.p;
  if (x0.size() != n) throw std::invalid_argument("lqr: initial state has wrong length");

  Vector x(x0.begin(), x0.end());
  Vector u(p);
  Vector next(n);
  double cost = 0.0;
  if (out) {
    out->states.clear();
    out->inputs.clear();
    out->states.push_back(x);
  }

  for (std::size_t t = 0; t <= inst.T; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += k(i, j) * x[j];
      u[i] = -s;
    }
    double stage = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += inst.Qc(i, j) * x[j];
      stage += x[i] * s;
    }
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += inst.Rc(i, j) * u[j];
      stage += u[i] * s;
    }
    cost += stage;

    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += inst.A(i, j) * x[j];
      for (std::size_t j = 0; j < p; ++j) s += inst.B(i, j) * u[j];
      next[i] = s + h_component(inst.ell, x[i]);
    }
    const double norm = norm2(next);
    if (!(norm <= kDivergenceThreshold)) throw Diverged("lqr rollout diverged");
    if (out) out->inputs.push_back(u);
    x.swap(next);
    if (out) out->states.push_back(x);
  }
  if (!std::isfinite(cost)) throw Diverged("lqr rollout cost is not finite");
  if (out) out->cost = cost;
  return cost;
}

Matrix unit_direction(std::size_t p, std::size_t n, std::size_t j, double scale) {
  Matrix e(p, n);
  e.flat()[j] = scale;
  return e;
}

}  // namespace

Vector h_eval(const LqrInstance& inst, std::span<const double> x) {
  Vector h(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h[i] = h_component(inst.ell, x[i]);
  return h;
}

Rollout rollout(const LqrInstance& inst, const Matrix& k, std::span<const double> x0) {
  check_gain(inst, k);
  Rollout r;
  simulate(inst, k, x0, &r);
  return r;
}

double mean_cost(const LqrInstance& inst, const Matrix& k) {
  check_gain(inst, k);
  if (inst.initial_states.empty()) throw std::invalid_argument("lqr: no initial states");
  double total = 0.0;
  for (const Vector& x0 : inst.initial_states) total += simulate(inst, k, x0, nullptr);
  return total / static_cast<double>(inst.initial_states.size());
}

double empirical_cost(const LqrInstance& inst, const Matrix& k, EvalCounter& counter) {
  counter.increment();
  return mean_cost(inst, k);
}

ZerothOrderGradient zeroth_order_grad(const LqrInstance& inst, const Matrix& k, EvalCounter& counter,
                                      ZerothOrderScheme scheme) {
  check_gain(inst, k);
  const double rs = inst.sampling_radius;
  const std::size_t d = inst.dim();
  ZerothOrderGradient out{Matrix(inst.p, inst.n), 0};

  for (std::size_t j = 0; j < d; ++j) {
    const Matrix u = unit_direction(inst.p, inst.n, j, rs);
    const double plus = empirical_cost(inst, k + u, counter);
    ++out.evals;
    if (scheme == ZerothOrderScheme::PaperOnePoint) {
      out.G.flat()[j] = plus / rs;
    } else {
      const double minus = empirical_cost(inst, k - u, counter);
      ++out.evals;
      out.G.flat()[j] = (plus - minus) / (2.0 * rs);
    }
  }
  return out;
}

Matrix initial_covariance(const LqrInstance& inst) {
  Matrix sigma(inst.n, inst.n);
  for (const Vector& x0 : inst.initial_states) {
    for (std::size_t i = 0; i < inst.n; ++i) {
      for (std::size_t j = 0; j < inst.n; ++j) sigma(i, j) += x0[i] * x0[j];
    }
  }
  sigma *= 1.0 / static_cast<double>(inst.initial_states.size());
  return sigma;
}

Matrix model_gradient(const LqrInstance& inst, const Matrix& k, LqrGradientWorkspace* ws) {
  check_gain(inst, k);
  Matrix acl = inst.A - inst.B * k;
  if (spectral_radius(acl) >= 1.0) throw SpectralRadiusError("model gradient: A - BK is not Schur stable");

  const Matrix kt = k.transpose();
  const Matrix pk = solve_discrete_lyapunov(acl, symmetric_part(inst.Qc + kt * inst.Rc * k));
  const Matrix sigma = solve_discrete_lyapunov(acl.transpose(), initial_covariance(inst));
  const Matrix bt_p = inst.B.transpose() * pk;
  const Matrix ek = (inst.Rc + bt_p * inst.B) * k - bt_p * inst.A;
  Matrix g = 2.0 * (ek * sigma);

  if (ws) *ws = {std::move(acl), pk, sigma, ek};
  return g;
}

double model_cost(const LqrInstance& inst, const Matrix& k) {
  LqrGradientWorkspace ws;
  model_gradient(inst, k, &ws);
  double total = 0.0;
  for (const Vector& x0 : inst.initial_states) total += dot(x0, ws.P_K * x0);
  return total / static_cast<double>(inst.initial_states.size());
}

void solve_model_optimum(LqrInstance& inst) {
  inst.K_hat_star = solve_dare(inst.A, inst.B, inst.Qc, inst.Rc).K;
}

LqrInstance make_lqr(Rng& rng, const LqrOptions& options) {
  if (options.n == 0 || options.p == 0) throw std::invalid_argument("make_lqr: dimensions must be positive");
  if (!(options.sampling_radius > 0.0)) throw std::invalid_argument("make_lqr: sampling radius must be positive");

  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    LqrInstance inst;
    inst.n = options.n;
    inst.p = options.p;
    inst.A = gaussian_matrix(rng, options.n, options.n);
    inst.B = gaussian_matrix(rng, options.n, options.p);
    inst.Qc = 2.0 * Matrix::identity(options.n);
    inst.Rc = Matrix::identity(options.p);
    inst.ell = options.ell;
    inst.T = options.T;
    inst.sampling_radius = options.sampling_radius;
    inst.seed = rng.seed();
    for (std::size_t i = 0; i < options.n; ++i) {
      Vector e(options.n, 0.0);
      e[i] = 1.0;
      inst.initial_states.push_back(std::move(e));
    }
    try {
      solve_model_optimum(inst);
      mean_cost(inst, inst.K_hat_star);
    } catch (const Error&) {
      continue;
    }
    return inst;
  }
  throw GenerationFailed("make_lqr: no usable instance after 50 draws");
}

std::unique_ptr<CompositeObjective> lqr_objective(const LqrInstance& inst, ZerothOrderScheme scheme) {
  auto shared = std::make_shared<const LqrInstance>(inst);
  const std::size_t p = inst.p;
  const std::size_t n = inst.n;

  auto value = [shared, p, n](std::span<const double> x) {
    try {
      return mean_cost(*shared, unflatten(x, p, n));
    } catch (const Diverged&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto model = [shared, p, n](std::span<const double> x) {
    return flatten(model_gradient(*shared, unflatten(x, p, n)));
  };
  GradientScheme exact = scheme == ZerothOrderScheme::PaperOnePoint ? one_point(inst.sampling_radius)
                                                                     : central_difference(inst.sampling_radius);
  auto obj = std::make_unique<CompositeObjective>(inst.dim(), std::move(value), std::move(model), std::move(exact));
  obj->set_model_value([shared, p, n](std::span<const double> x) { return model_cost(*shared, unflatten(x, p, n)); });
  return obj;
}

Matrix reference_optimum(LqrInstance& inst, double tol, std::size_t max_iters) {
  auto obj = lqr_objective(inst, ZerothOrderScheme::CentralDifference);
  GcConfig config;
  config.termination_metric = TerminationMetric::GradientNorm;
  config.termination_tol = tol;
  config.max_outer_iters = max_iters;
  const ConvergenceTrace trace = model_free_solve(*obj, flatten(inst.K_hat_star), config);
  if (!trace.converged) {
    throw NotConverged("reference optimum: " + std::string(trace.stop_reason));
  }
  inst.K_star_ref = unflatten(trace.final_point, inst.p, inst.n);
  return *inst.K_star_ref;
}

Vector flatten(const Matrix& k) { return k.entries(); }

Matrix unflatten(std::span<const double> x, std::size_t p, std::size_t n) {
  if (x.size() != p * n) throw std::invalid_argument("unflatten: size mismatch");
  return Matrix(p, n, Vector(x.begin(), x.end()));
}

}  // namespace gradcomp
