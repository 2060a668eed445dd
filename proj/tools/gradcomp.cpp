// Experiment runner: gradcomp quad|lqr [flags], gradcomp sweep ..., gradcomp rerun <meta>.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gradcomp/error.hpp"
#include "gradcomp/experiment.hpp"

namespace {

using gradcomp::ExperimentConfig;

constexpr int kExitFailure = 1;
constexpr int kExitNotConverged = 2;

// Flag values as typed; turned into a config once the kind is known.
struct Flags {
  std::uint64_t seed = 0;
  std::string solver = "gc";
  std::optional<double> gamma, alpha, beta, eta_min, eta_max, tol, ell, sampling_radius, fd_step, reference_tol;
  std::optional<std::string> l_r, grad_scheme, instance;
  std::optional<std::size_t> max_outer_iters, n, p, horizon;
  std::string out;
  bool svg = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Instance seed (GRADCOMP_SEED overrides)");
  cmd->add_option("--solver", f.solver, "gc or model-free")->check(CLI::IsMember({"gc", "model-free"}));
  cmd->add_option("--gamma", f.gamma, "Monitor parameter in (0, 1)");
  cmd->add_option("--l-r", f.l_r, "Residual smoothness constant, or 'computed' (quad only)");
  cmd->add_option("--alpha", f.alpha);
  cmd->add_option("--beta", f.beta);
  cmd->add_option("--eta-min", f.eta_min, "Model-based step floor");
  cmd->add_option("--eta-max", f.eta_max);
  cmd->add_option("--tol", f.tol, "Stop when the distance to the optimum drops below this");
  cmd->add_option("--max-outer-iters", f.max_outer_iters);
  cmd->add_option("--grad-scheme", f.grad_scheme, "forward-difference, central-difference or paper-one-point")
      ->check(CLI::IsMember({"forward-difference", "central-difference", "paper-one-point"}));
  cmd->add_option("--n", f.n, "State / decision dimension");
  cmd->add_option("--p", f.p, "Input dimension (lqr)");
  cmd->add_option("--ell", f.ell, "Nonlinearity scale (lqr)");
  cmd->add_option("--horizon", f.horizon, "Rollout horizon T (lqr)");
  cmd->add_option("--sampling-radius", f.sampling_radius, "Zeroth-order radius (lqr)");
  cmd->add_option("--fd-step", f.fd_step, "Finite-difference step (quad)");
  cmd->add_option("--reference-tol", f.reference_tol, "Gradient tolerance of the reference solve (lqr)");
  cmd->add_option("--instance", f.instance, "Load the instance from a file instead of generating it");
  cmd->add_option("--out", f.out, "Output prefix for .csv/.meta/.svg");
  cmd->add_flag("--svg", f.svg, "Also write <out>.svg");
}

ExperimentConfig build_config(gradcomp::ExperimentKind kind, const Flags& f) {
  ExperimentConfig c = gradcomp::default_config(kind);
  c.seed = f.seed;
  if (const char* env = std::getenv("GRADCOMP_SEED")) {
    const std::string_view s(env);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("GRADCOMP_SEED is not an integer");
    c.seed = v;
  }
  c.solver = gradcomp::parse_solver_kind(f.solver);
  if (f.gamma) c.gamma = *f.gamma;
  if (f.l_r) {
    if (*f.l_r == "computed") {
      c.lipschitz_from_instance = true;
    } else {
      std::size_t used = 0;
      c.lipschitz_residual = std::stod(*f.l_r, &used);
      if (used != f.l_r->size()) throw std::invalid_argument("--l-r must be a number or 'computed'");
    }
  }
  if (f.alpha) c.alpha = *f.alpha;
  if (f.beta) c.beta = *f.beta;
  if (f.eta_min) c.eta_min = *f.eta_min;
  if (f.eta_max) c.eta_max = *f.eta_max;
  if (f.tol) c.termination_tol = *f.tol;
  if (f.max_outer_iters) c.max_outer_iters = *f.max_outer_iters;
  if (f.grad_scheme) c.gradient_scheme = gradcomp::parse_grad_scheme(*f.grad_scheme);
  if (f.n) c.n = *f.n;
  if (f.p) c.p = *f.p;
  if (f.ell) c.ell = *f.ell;
  if (f.horizon) c.horizon = *f.horizon;
  if (f.sampling_radius) c.sampling_radius = *f.sampling_radius;
  if (f.fd_step) c.fd_step = *f.fd_step;
  if (f.reference_tol) c.reference_tol = *f.reference_tol;
  if (f.instance) c.instance_path = *f.instance;
  c.output_path = f.out;
  c.emit_svg = f.svg;
  if (c.emit_svg && c.output_path.empty()) throw std::invalid_argument("--svg needs --out");
  c.validate();
  return c;
}

int report(const gradcomp::RunResult& r) {
  const auto& t = r.trace;
  std::cout << "total_evals=" << t.total_evals << " mb_accepts=" << t.model_based_accepts()
            << " mf_accepts=" << t.model_free_accepts() << " final_error=" << gradcomp::format_double(t.final_error)
            << " converged=" << (t.converged ? 1 : 0) << '\n';
  if (!t.converged) {
    std::cerr << "solve: did not converge (" << t.stop_reason << ")\n";
    return kExitNotConverged;
  }
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
    values.push_back(v);
    start = end + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient compensation experiments"};
  app.require_subcommand(1);

  Flags quad_flags, lqr_flags, sweep_flags;
  auto* quad = app.add_subcommand("quad", "Composite quadratic benchmark");
  add_flags(quad, quad_flags);
  auto* lqr = app.add_subcommand("lqr", "Modified LQR benchmark");
  add_flags(lqr, lqr_flags);

  auto* sweep = app.add_subcommand("sweep", "One run per parameter value on a shared instance");
  std::string sweep_param, sweep_values, sweep_kind = "lqr";
  unsigned sweep_threads = 0;
  sweep->add_option("--param", sweep_param, "gamma, L_r or eta_min")
      ->required()
      ->check(CLI::IsMember({"gamma", "L_r", "eta_min"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--experiment", sweep_kind, "quad or lqr")->check(CLI::IsMember({"quad", "lqr"}));
  sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
  add_flags(sweep, sweep_flags);

  auto* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a .meta file");
  std::string meta_path, rerun_out;
  rerun->add_option("meta", meta_path, "Path to a .meta file")->required();
  rerun->add_option("--out", rerun_out, "Write outputs here instead of the recorded prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (quad->parsed()) {
      return report(gradcomp::run_experiment(build_config(gradcomp::ExperimentKind::Quad, quad_flags)));
    }
    if (lqr->parsed()) {
      return report(gradcomp::run_experiment(build_config(gradcomp::ExperimentKind::Lqr, lqr_flags)));
    }
    if (sweep->parsed()) {
      const ExperimentConfig base = build_config(gradcomp::parse_experiment_kind(sweep_kind), sweep_flags);
      const auto rows = gradcomp::run_sweep(base, sweep_param, parse_values(sweep_values), sweep_threads);
      int code = 0;
      for (const auto& r : rows) {
        if (!r.converged) {
          std::cerr << "sweep: " << sweep_param << '=' << gradcomp::format_double(r.value) << " failed: " << r.error
                    << '\n';
          code = kExitNotConverged;
        }
      }
      if (base.output_path.empty()) {
        gradcomp::write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(base.output_path + ".summary.csv", std::ios::binary);
        if (!out) throw gradcomp::Error("write: cannot open " + base.output_path + ".summary.csv");
        gradcomp::write_sweep_csv(out, rows);
      }
      return code;
    }
    std::ifstream in(meta_path);
    if (!in) throw gradcomp::Error("rerun: cannot open " + meta_path);
    const auto meta = gradcomp::read_meta(in);
    ExperimentConfig c = gradcomp::config_from_meta(meta);
    if (!rerun_out.empty()) c.output_path = rerun_out;
    const auto result = gradcomp::run_experiment(c);
    if (const auto it = meta.find("fingerprint"); it != meta.end() && it->second != result.fingerprint) {
      std::cerr << "rerun: instance fingerprint differs from the recorded one\n";
      return kExitFailure;
    }
    return report(result);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitFailure;
  }
}
