#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gradcomp/composite.hpp"
#include "gradcomp/matrix.hpp"

namespace gradcomp {

/// Upper limit on step shrinks in any line search. With η_min = 0 (the
/// standard search) this is the only thing that ends a failing search.
inline constexpr int kMaxHalvings = 200;

struct LineSearchParams {
  double alpha = 0.3;   // Armijo slope, (0, 1/2]
  double beta = 0.5;    // shrink factor, (0, 1)
  double eta_min = 0.0; // step floor; 0 selects the standard search
  double eta_max = 1.0; // first trial step

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct LineSearchTrial {
  double eta;
  double f_value;
};

struct LineSearchOutcome {
  /// Accepted step, or 0 on failure.
  double eta = 0.0;
  /// x − η·Δ on success, x itself on failure.
  Vector accepted_point;
  double f_at_accepted = 0.0;
  std::uint64_t evals_used = 0;
  /// Every Armijo test, in order; one evaluation each.
  std::vector<LineSearchTrial> trials;

  bool succeeded() const noexcept { return eta > 0.0; }
};

/**
 * Backtracking search along −Δ with a step floor.
 *
 * Trial steps are η_max, βη_max, β²η_max, ...; each Armijo test
 * f(x − ηΔ) ≤ f(x) − αη‖Δ‖² costs one evaluation of f. The first trial that
 * passes is accepted. A failed test at a step already ≤ η_min ends the
 * search with η = 0. f_x is f(x) and is not re-evaluated. Non-finite trial
 * values count as Armijo failures. For Δ ≠ 0 the test also demands
 * f(x − ηΔ) < f(x): once ηΔ rounds away, both sides of the Armijo test
 * collapse to f(x) and would otherwise pass with equality.
 */
LineSearchOutcome bt_line_search(CompositeObjective& obj, std::span<const double> x, double f_x,
                                 std::span<const double> direction, const LineSearchParams& params);

/// Worst-case evaluations of one search: the smallest m with
/// β^(m−1)·η_max ≤ η_min, i.e. ⌈log(η_min/η_max)/log β + 1⌉. Counted with
/// the same multiplication sequence the search uses, so the bound is exact
/// for it. For η_min = 0 returns kMaxHalvings + 1.
std::uint64_t m_max(const LineSearchParams& params);

}  // namespace gradcomp
