#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "gradcomp/lqrenv.hpp"
#include "gradcomp/quadbench.hpp"

namespace gradcomp {

using Instance = std::variant<QuadraticInstance, LqrInstance>;

/**
 * Plain-text instance format:
 *
 *   gradcomp-instance v1 <quad|lqr>
 *   seed <N>
 *   <name> <rows> <cols>
 *   <rows lines of cols numbers, %.17g>
 *   ...
 *
 * Scalars are stored as 1x1 matrices. Matrices appear in a fixed order per
 * kind, so save → load → save reproduces the same bytes.
 */
void write_instance(std::ostream& out, const Instance& inst);
std::string instance_to_string(const Instance& inst);

/// Throws ParseError with the offending line number.
Instance read_instance(std::istream& in);

void save_instance(const std::filesystem::path& path, const Instance& inst);
Instance load_instance(const std::filesystem::path& path);

}  // namespace gradcomp
