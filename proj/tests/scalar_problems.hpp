// Small closed-form objectives shared by several tests.
#pragma once

#include <memory>

#include "gradcomp/composite.hpp"

namespace testing_problems {

/// f(x) = (x − 2)², model f̂(x) = x², so r(x) = 4 − 4x and ∇r ≡ −4.
inline std::unique_ptr<gradcomp::CompositeObjective> shifted_parabola(bool oracle = true) {
  auto obj = std::make_unique<gradcomp::CompositeObjective>(
      1, [](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); },
      [](std::span<const double> x) { return gradcomp::Vector{2.0 * x[0]}; }, gradcomp::central_difference(1e-6));
  obj->set_oracle_gradient([](std::span<const double> x) { return gradcomp::Vector{2.0 * (x[0] - 2.0)}; });
  if (oracle) obj->use_oracle_gradient(true);
  return obj;
}

}  // namespace testing_problems
