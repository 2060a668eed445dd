#include "gradcomp/quadbench.hpp"

#include <stdexcept>

#include "gradcomp/random_matrix.hpp"
#include "gradcomp/spectral.hpp"

namespace gradcomp {

QuadraticInstance QuadraticInstance::from_matrices(Matrix p, Matrix q, double c1, double c2, Vector c3,
                                                   std::uint64_t seed) {
  const std::size_t n = p.rows();
  if (n == 0 || !p.is_square() || q.rows() != n || !q.is_square() || c3.size() != n) {
    throw std::invalid_argument("quadratic instance: shape mismatch");
  }
  if (!(c1 > 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("quadratic instance: need c1 > 0, c2 >= 0");

  QuadraticInstance inst;
  inst.n = n;
  inst.P = std::move(p);
  inst.Q = std::move(q);
  inst.c1 = c1;
  inst.c2 = c2;
  inst.c3 = std::move(c3);
  inst.seed = seed;
  inst.x_hat_star.assign(n, 0.0);
  inst.x_star = solve(inst.hessian(), scaled(c2, inst.Q * inst.c3));
  inst.lr_true = c2 * max_eigenvalue(inst.Q);
  return inst;
}

Matrix QuadraticInstance::hessian() const { return c1 * P + c2 * Q; }

double QuadraticInstance::model_value(std::span<const double> x) const { return 0.5 * c1 * dot(x, P * x); }

double QuadraticInstance::residual_value(std::span<const double> x) const {
  const Vector d = subtract(x, c3);
  return 0.5 * c2 * dot(d, Q * d);
}

double QuadraticInstance::value(std::span<const double> x) const { return model_value(x) + residual_value(x); }

Vector QuadraticInstance::model_gradient(std::span<const double> x) const { return scaled(c1, P * x); }

Vector QuadraticInstance::residual_gradient(std::span<const double> x) const {
  return scaled(c2, Q * subtract(x, c3));
}

Vector QuadraticInstance::gradient(std::span<const double> x) const {
  return add(model_gradient(x), residual_gradient(x));
}

double QuadraticInstance::mu() const { return min_eigenvalue(hessian()); }

double QuadraticInstance::smoothness() const { return max_eigenvalue(hessian()); }

QuadraticInstance make_quadratic(Rng& rng, std::size_t n, double c1, double c2, double c3, double spectral_radius_q) {
  if (n == 0) throw std::invalid_argument("make_quadratic: n must be positive");
  Matrix p = random_spd(rng, n);
  Matrix q = random_spd_with_spectral_radius(rng, n, spectral_radius_q);
  return QuadraticInstance::from_matrices(std::move(p), std::move(q), c1, c2, Vector(n, c3), rng.seed());
}

std::unique_ptr<CompositeObjective> quad_objective(const QuadraticInstance& inst, QuadObjectiveOptions options) {
  auto shared = std::make_shared<const QuadraticInstance>(inst);
  GradientScheme scheme = options.scheme == QuadScheme::CentralDifference ? central_difference(options.fd_step)
                                                                           : forward_difference(options.fd_step);
  auto obj = std::make_unique<CompositeObjective>(
      inst.n, [shared](std::span<const double> x) { return shared->value(x); },
      [shared](std::span<const double> x) { return shared->model_gradient(x); }, std::move(scheme));
  obj->set_model_value([shared](std::span<const double> x) { return shared->model_value(x); });
  obj->set_oracle_gradient([shared](std::span<const double> x) { return shared->gradient(x); });
  if (options.analytic) obj->use_oracle_gradient(true);
  return obj;
}

}  // namespace gradcomp
