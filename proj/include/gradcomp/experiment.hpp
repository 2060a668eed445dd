#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gradcomp/instance_io.hpp"
#include "gradcomp/solver.hpp"

namespace gradcomp {

enum class ExperimentKind { Quad, Lqr };
enum class SolverKind { Gc, ModelFree };
enum class GradSchemeKind { ForwardDifference, CentralDifference, PaperOnePoint };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(SolverKind k);
std::string_view to_string(GradSchemeKind k);
ExperimentKind parse_experiment_kind(std::string_view s);
SolverKind parse_solver_kind(std::string_view s);
GradSchemeKind parse_grad_scheme(std::string_view s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Quad;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::Gc;
  double gamma = 0.6;
  double lipschitz_residual = 0.1;
  /// Quad only: use c2·λ_max(Q) of the generated instance instead.
  bool lipschitz_from_instance = false;
  double alpha = 0.3;
  double beta = 0.5;
  double eta_min = 0.005;
  double eta_max = 1.0;
  double termination_tol = 1e-3;
  std::size_t max_outer_iters = 100000;
  GradSchemeKind gradient_scheme = GradSchemeKind::ForwardDifference;

  // Instance shape.
  std::size_t n = 4;
  std::size_t p = 3;
  double ell = 0.01;
  std::size_t horizon = 50;
  double sampling_radius = 1e-3;
  double fd_step = 1e-6;
  double reference_tol = 1e-4;
  std::size_t reference_max_iters = 20000;
  /// Read the instance from this file instead of generating it.
  std::optional<std::filesystem::path> instance_path;

  std::string output_path;
  bool emit_svg = false;

  void validate() const;
};

/// quad: α=0.3, β=0.5, η_max=1, η_min=0.005, γ=0.6, L_r=0.1, tol 1e-3.
/// lqr:  α=0.3, β=0.5, η_max=1, η_min=0.05,  γ=0.6, L_r=0.1, tol 1e-4.
ExperimentConfig default_config(ExperimentKind kind);

/// Generated (or loaded) instance, the point every solver starts from and
/// the optimum the error column is measured against.
struct PreparedExperiment {
  Instance instance;
  Vector start;
  Vector reference;
  std::string fingerprint;
};

/// Throws Error with the failing stage in the message.
PreparedExperiment prepare_experiment(const ExperimentConfig& config);

struct RunResult {
  ConvergenceTrace trace;
  std::string fingerprint;
  double lipschitz_residual = 0.0;
};

RunResult run_prepared(const ExperimentConfig& config, const PreparedExperiment& prepared);

/// prepare + run, then writes <out>.csv, <out>.meta and (optionally)
/// <out>.svg when output_path is set.
RunResult run_experiment(const ExperimentConfig& config);

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);
void write_meta(std::ostream& out, const ExperimentConfig& config, const RunResult& result);
/// log₁₀ error against evaluation index; one circle per Accept row.
void write_svg(std::ostream& out, const ConvergenceTrace& trace);

/// key=value lines of a .meta file.
std::map<std::string, std::string> read_meta(std::istream& in);
/// Rebuilds the configuration recorded in a .meta file.
ExperimentConfig config_from_meta(const std::map<std::string, std::string>& meta);

struct SweepRow {
  double value = 0.0;
  std::uint64_t total_evals = 0;
  std::size_t mb_steps = 0;
  std::size_t mf_steps = 0;
  bool converged = false;
  std::string error;
};

/// One run per value of `param` (gamma, L_r or eta_min) on a shared
/// instance, spread over up to `threads` workers (0 = hardware).
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, std::string_view param, const std::vector<double>& values,
                                unsigned threads = 0);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace gradcomp
