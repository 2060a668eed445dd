#include "gradcomp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "gradcomp/error.hpp"

namespace gradcomp {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Prefixes the failing stage onto any library error.
template <class F>
auto stage(std::string_view name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write: cannot open " + path);
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw Error("meta: bad number for " + key);
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw Error("meta: bad integer for " + key);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view to_string(ExperimentKind k) { return k == ExperimentKind::Quad ? "quad" : "lqr"; }
std::string_view to_string(SolverKind k) { return k == SolverKind::Gc ? "gc" : "model-free"; }

std::string_view to_string(GradSchemeKind k) {
  switch (k) {
    case GradSchemeKind::ForwardDifference: return "forward-difference";
    case GradSchemeKind::CentralDifference: return "central-difference";
    case GradSchemeKind::PaperOnePoint: return "paper-one-point";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  if (s == "quad") return ExperimentKind::Quad;
  if (s == "lqr") return ExperimentKind::Lqr;
  throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

SolverKind parse_solver_kind(std::string_view s) {
  if (s == "gc") return SolverKind::Gc;
  if (s == "model-free") return SolverKind::ModelFree;
  throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

GradSchemeKind parse_grad_scheme(std::string_view s) {
  if (s == "forward-difference") return GradSchemeKind::ForwardDifference;
  if (s == "central-difference") return GradSchemeKind::CentralDifference;
  if (s == "paper-one-point") return GradSchemeKind::PaperOnePoint;
  throw std::invalid_argument("unknown gradient scheme '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (experiment == ExperimentKind::Quad && gradient_scheme == GradSchemeKind::PaperOnePoint) {
    throw std::invalid_argument("paper-one-point is only available for lqr");
  }
  if (experiment == ExperimentKind::Lqr && gradient_scheme == GradSchemeKind::ForwardDifference) {
    throw std::invalid_argument("forward-difference is only available for quad");
  }
  if (lipschitz_from_instance && experiment != ExperimentKind::Quad) {
    throw std::invalid_argument("a computed L_r is only available for quad");
  }
  if (n == 0 || (experiment == ExperimentKind::Lqr && p == 0)) throw std::invalid_argument("dimensions must be positive");
  if (!(fd_step > 0.0) || !(sampling_radius > 0.0) || !(reference_tol > 0.0)) {
    throw std::invalid_argument("step sizes and tolerances must be positive");
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  if (kind == ExperimentKind::Lqr) {
    c.eta_min = 0.05;
    c.termination_tol = 1e-4;
    c.max_outer_iters = 20000;
    c.gradient_scheme = GradSchemeKind::CentralDifference;
  }
  return c;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  PreparedExperiment out;

  out.instance = stage("generate", [&]() -> Instance {
    if (config.instance_path) {
      Instance loaded = load_instance(*config.instance_path);
      const bool is_quad = std::holds_alternative<QuadraticInstance>(loaded);
      if (is_quad != (config.experiment == ExperimentKind::Quad)) {
        throw Error("instance file holds a different experiment kind");
      }
      return loaded;
    }
    Rng rng(config.seed);
    if (config.experiment == ExperimentKind::Quad) return make_quadratic(rng, config.n);
    return make_lqr(rng, {config.n, config.p, config.ell, config.horizon, config.sampling_radius});
  });

  stage("reference", [&] {
    if (auto* q = std::get_if<QuadraticInstance>(&out.instance)) {
      out.start = q->x_hat_star;
      out.reference = q->x_star;
      return;
    }
    auto& l = std::get<LqrInstance>(out.instance);
    out.start = flatten(l.K_hat_star);
    if (!l.K_star_ref) reference_optimum(l, config.reference_tol, config.reference_max_iters);
    out.reference = flatten(*l.K_star_ref);
  });

  out.fingerprint = hex64(fnv1a(instance_to_string(out.instance)));
  return out;
}

RunResult run_prepared(const ExperimentConfig& config, const PreparedExperiment& prepared) {
  config.validate();
  RunResult result;
  result.fingerprint = prepared.fingerprint;

  std::unique_ptr<CompositeObjective> obj;
  result.lipschitz_residual = config.lipschitz_residual;
  if (const auto* q = std::get_if<QuadraticInstance>(&prepared.instance)) {
    QuadObjectiveOptions opts;
    opts.scheme = config.gradient_scheme == GradSchemeKind::CentralDifference ? QuadScheme::CentralDifference
                                                                              : QuadScheme::ForwardDifference;
    opts.fd_step = config.fd_step;
    obj = quad_objective(*q, opts);
    if (config.lipschitz_from_instance) result.lipschitz_residual = q->lr_true;
  } else {
    const auto& l = std::get<LqrInstance>(prepared.instance);
    obj = lqr_objective(l, config.gradient_scheme == GradSchemeKind::PaperOnePoint
                               ? ZerothOrderScheme::PaperOnePoint
                               : ZerothOrderScheme::CentralDifference);
  }

  GcConfig gc;
  gc.gamma = config.gamma;
  gc.lipschitz_residual = result.lipschitz_residual;
  gc.ls_model_based = {config.alpha, config.beta, config.eta_min, config.eta_max};
  gc.ls_model_free = {config.alpha, config.beta, 0.0, config.eta_max};
  gc.max_outer_iters = config.max_outer_iters;
  gc.termination_tol = config.termination_tol;
  gc.termination_metric = TerminationMetric::DistanceToReference;
  gc.reference = prepared.reference;

  result.trace = stage("solve", [&] {
    return config.solver == SolverKind::Gc ? gc_solve(*obj, prepared.start, gc)
                                           : model_free_solve(*obj, prepared.start, gc);
  });
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  RunResult result = run_prepared(config, prepared);
  if (config.output_path.empty()) return result;

  {
    auto out = open_output(config.output_path + ".csv");
    write_trace_csv(out, result.trace);
  }
  {
    auto out = open_output(config.output_path + ".meta");
    write_meta(out, config, result);
  }
  if (config.emit_svg) {
    auto out = open_output(config.output_path + ".svg");
    write_svg(out, result.trace);
  }
  return result;
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "eval_index,f_value,error,regime,event\n";
  for (const auto& r : trace.records) {
    out << r.eval_index << ',' << format_double(r.f_value) << ',' << format_double(r.error) << ','
        << to_string(r.regime) << ',' << to_string(r.event) << '\n';
  }
}

void write_meta(std::ostream& out, const ExperimentConfig& c, const RunResult& result) {
  auto kv = [&](std::string_view key, const auto& value) { out << key << '=' << value << '\n'; };
  kv("experiment", to_string(c.experiment));
  kv("seed", c.seed);
  kv("solver", to_string(c.solver));
  kv("gamma", format_double(c.gamma));
  kv("L_r", c.lipschitz_from_instance ? std::string("computed") : format_double(c.lipschitz_residual));
  kv("alpha", format_double(c.alpha));
  kv("beta", format_double(c.beta));
  kv("eta_min", format_double(c.eta_min));
  kv("eta_max", format_double(c.eta_max));
  kv("tol", format_double(c.termination_tol));
  kv("max_outer_iters", c.max_outer_iters);
  kv("grad_scheme", to_string(c.gradient_scheme));
  kv("n", c.n);
  kv("p", c.p);
  kv("ell", format_double(c.ell));
  kv("horizon", c.horizon);
  kv("sampling_radius", format_double(c.sampling_radius));
  kv("fd_step", format_double(c.fd_step));
  kv("reference_tol", format_double(c.reference_tol));
  kv("reference_max_iters", c.reference_max_iters);
  kv("instance", c.instance_path ? c.instance_path->string() : std::string());
  kv("out", c.output_path);
  kv("svg", c.emit_svg ? 1 : 0);

  kv("fingerprint", result.fingerprint);
  kv("L_r_used", format_double(result.lipschitz_residual));
  kv("total_evals", result.trace.total_evals);
  kv("mb_accepts", result.trace.model_based_accepts());
  kv("mf_accepts", result.trace.model_free_accepts());
  kv("outer_iterations", result.trace.outer_iterations);
  kv("converged", result.trace.converged ? 1 : 0);
  kv("final_error", format_double(result.trace.final_error));
  kv("stop_reason", result.trace.stop_reason);
}

std::map<std::string, std::string> read_meta(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

ExperimentConfig config_from_meta(const std::map<std::string, std::string>& meta) {
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw Error("meta: missing key " + key);
    return it->second;
  };
  auto num = [&](const std::string& key) { return parse_double(key, get(key)); };
  auto whole = [&](const std::string& key) { return parse_u64(key, get(key)); };

  ExperimentConfig c = default_config(parse_experiment_kind(get("experiment")));
  c.seed = whole("seed");
  c.solver = parse_solver_kind(get("solver"));
  c.gamma = num("gamma");
  if (get("L_r") == "computed") {
    c.lipschitz_from_instance = true;
  } else {
    c.lipschitz_residual = num("L_r");
  }
  c.alpha = num("alpha");
  c.beta = num("beta");
  c.eta_min = num("eta_min");
  c.eta_max = num("eta_max");
  c.termination_tol = num("tol");
  c.max_outer_iters = whole("max_outer_iters");
  c.gradient_scheme = parse_grad_scheme(get("grad_scheme"));
  c.n = whole("n");
  c.p = whole("p");
  c.ell = num("ell");
  c.horizon = whole("horizon");
  c.sampling_radius = num("sampling_radius");
  c.fd_step = num("fd_step");
  c.reference_tol = num("reference_tol");
  c.reference_max_iters = whole("reference_max_iters");
  if (!get("instance").empty()) c.instance_path = get("instance");
  c.output_path = get("out");
  c.emit_svg = get("svg") == "1";
  return c;
}

void write_svg(std::ostream& out, const ConvergenceTrace& trace) {
  constexpr double kWidth = 800, kHeight = 480, kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
  constexpr const char* kModelBased = "#d62728";
  constexpr const char* kModelFree = "#1f77b4";

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::uint64_t max_eval = 1;
  for (const auto& r : trace.records) {
    max_eval = std::max(max_eval, r.eval_index);
    if (std::isfinite(r.error) && r.error > 0.0) {
      lo = std::min(lo, std::log10(r.error));
      hi = std::max(hi, std::log10(r.error));
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  lo = std::floor(lo);
  hi = std::max(std::ceil(hi), lo + 1.0);

  auto px = [&](std::uint64_t e) { return kLeft + (kWidth - kLeft - kRight) * static_cast<double>(e) / max_eval; };
  auto py = [&](double err) {
    const double l = (std::isfinite(err) && err > 0.0) ? std::clamp(std::log10(err), lo, hi) : lo;
    return kTop + (kHeight - kTop - kBottom) * (hi - l) / (hi - lo);
  };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke=\"#888\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << kHeight - kBottom << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
      << "\"/>\n</g>\n";
  for (double d = lo; d <= hi; d += 1.0) {
    const double y = kTop + (kHeight - kTop - kBottom) * (hi - d) / (hi - lo);
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  out << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 18 << "\">0</text>\n";
  out << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"end\">"
      << max_eval << "</text>\n";
  out << "<text x=\"" << (kWidth + kLeft) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">function evaluations</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\" text-anchor=\"middle\">error</text>\n";

  // Runs of rows in one regime become one polyline; each run starts at the
  // last point of the previous one so the curve stays connected.
  const auto& rows = trace.records;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].regime == rows[i].regime) ++j;
    const std::size_t from = i > 0 ? i - 1 : i;
    const bool mb = rows[i].regime == Regime::ModelBased;
    out << "<polyline class=\"" << (mb ? "mb" : "mf") << "\" fill=\"none\" stroke=\""
        << (mb ? kModelBased : kModelFree) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = from; k < j; ++k) {
      if (k > from) out << ' ';
      out << fmt(px(rows[k].eval_index)) << ',' << fmt(py(rows[k].error));
    }
    out << "\"/>\n";
    i = j;
  }
  for (const auto& r : rows) {
    if (r.event != TraceEvent::Accept) continue;
    const bool mb = r.regime == Regime::ModelBased;
    out << "<circle class=\"accept " << (mb ? "mb" : "mf") << "\" cx=\"" << fmt(px(r.eval_index)) << "\" cy=\""
        << fmt(py(r.error)) << "\" r=\"2.5\" fill=\"" << (mb ? kModelBased : kModelFree) << "\"/>\n";
  }
  out << "</svg>\n";
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, std::string_view param, const std::vector<double>& values,
                                unsigned threads) {
  if (param != "gamma" && param != "L_r" && param != "eta_min") {
    throw std::invalid_argument("sweep parameter must be gamma, L_r or eta_min");
  }
  std::vector<SweepRow> rows(values.size());
  if (values.empty()) return rows;

  const PreparedExperiment prepared = prepare_experiment(base);

  auto run_one = [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.value = values[idx];
    ExperimentConfig c = base;
    if (param == "gamma") {
      c.gamma = values[idx];
    } else if (param == "L_r") {
      c.lipschitz_residual = values[idx];
      c.lipschitz_from_instance = false;
    } else {
      c.eta_min = values[idx];
    }
    try {
      const RunResult r = run_prepared(c, prepared);
      row.total_evals = r.trace.total_evals;
      row.mb_steps = r.trace.model_based_accepts();
      row.mf_steps = r.trace.model_free_accepts();
      row.converged = r.trace.converged;
      if (!r.trace.converged) row.error = std::string(r.trace.stop_reason);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, values.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t idx = next++; idx < values.size(); idx = next++) run_one(idx);
    });
  }
  pool.clear();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "value,total_evals,mb_steps,mf_steps,converged\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << r.total_evals << ',' << r.mb_steps << ',' << r.mf_steps << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

}  // namespace gradcomp
