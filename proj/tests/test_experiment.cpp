#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gradcomp/error.hpp"
#include "gradcomp/experiment.hpp"
#include "gradcomp/instance_io.hpp"
#include "gradcomp/lqrenv.hpp"
#include "gradcomp/quadbench.hpp"

using namespace gradcomp;

namespace {

std::string csv_of(const ConvergenceTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gradcomp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(InstanceIo, QuadRoundTripIsByteIdentical) {
  Rng rng(3);
  QuadraticInstance inst = make_quadratic(rng);
  inst.seed = 3;
  const std::string text = instance_to_string(inst);
  std::istringstream in(text);
  const Instance back = read_instance(in);
  ASSERT_TRUE(std::holds_alternative<QuadraticInstance>(back));
  const auto& q = std::get<QuadraticInstance>(back);
  EXPECT_EQ(q.P, inst.P);
  EXPECT_EQ(q.Q, inst.Q);
  EXPECT_EQ(q.x_star, inst.x_star);
  EXPECT_EQ(q.seed, 3u);
  EXPECT_EQ(instance_to_string(back), text);
}

TEST(InstanceIo, LqrRoundTripKeepsGains) {
  Rng rng(1);
  LqrInstance inst = make_lqr(rng);
  inst.K_star_ref = inst.K_hat_star + 0.01 * Matrix::identity(3) * inst.K_hat_star;
  const std::string text = instance_to_string(inst);
  std::istringstream in(text);
  const auto back = std::get<LqrInstance>(read_instance(in));
  EXPECT_EQ(back.A, inst.A);
  EXPECT_EQ(back.B, inst.B);
  EXPECT_EQ(back.K_hat_star, inst.K_hat_star);
  ASSERT_TRUE(back.K_star_ref.has_value());
  EXPECT_EQ(*back.K_star_ref, *inst.K_star_ref);
  EXPECT_EQ(back.initial_states, inst.initial_states);
  EXPECT_EQ(instance_to_string(back), text);
}

TEST(InstanceIo, TruncatedFileNamesTheMatrix) {
  Rng rng(2);
  const std::string text = instance_to_string(make_quadratic(rng));
  const std::string cut = text.substr(0, text.size() - 20);
  std::istringstream in(cut);
  try {
    read_instance(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'Q'"), std::string::npos) << e.what();
  }
}

TEST(InstanceIo, RejectsUnknownHeader) {
  std::istringstream in("not-an-instance v1 quad\n");
  EXPECT_THROW(read_instance(in), ParseError);
}

TEST(InstanceIo, LoadedLqrMatchesRegeneration) {
  const auto dir = scratch_dir("lqr_load");
  ExperimentConfig config = default_config(ExperimentKind::Lqr);
  config.seed = 0;
  Rng rng(config.seed);
  const LqrInstance inst = make_lqr(rng);
  save_instance(dir / "inst.txt", inst);
  const auto loaded = std::get<LqrInstance>(load_instance(dir / "inst.txt"));
  EXPECT_EQ(loaded.K_hat_star, inst.K_hat_star);
  LqrInstance resolved = loaded;
  solve_model_optimum(resolved);
  EXPECT_LE(frobenius_norm(resolved.K_hat_star - inst.K_hat_star), 1e-12);
}

TEST(Config, Validation) {
  ExperimentConfig quad = default_config(ExperimentKind::Quad);
  EXPECT_NO_THROW(quad.validate());
  quad.gradient_scheme = GradSchemeKind::PaperOnePoint;
  EXPECT_THROW(quad.validate(), std::invalid_argument);

  ExperimentConfig lqr = default_config(ExperimentKind::Lqr);
  EXPECT_EQ(lqr.eta_min, 0.05);
  EXPECT_EQ(lqr.termination_tol, 1e-4);
  lqr.lipschitz_from_instance = true;
  EXPECT_THROW(lqr.validate(), std::invalid_argument);
  EXPECT_THROW(parse_solver_kind("newton"), std::invalid_argument);
}

TEST(Experiment, QuadTraceIsDeterministic) {
  ExperimentConfig config = default_config(ExperimentKind::Quad);
  config.seed = 4;
  const RunResult a = run_experiment(config);
  const RunResult b = run_experiment(config);
  EXPECT_TRUE(a.trace.converged);
  EXPECT_EQ(csv_of(a.trace), csv_of(b.trace));
  EXPECT_EQ(a.fingerprint, b.fingerprint);
}

TEST(Experiment, CsvHeaderAndRows) {
  ExperimentConfig config = default_config(ExperimentKind::Quad);
  const RunResult r = run_experiment(config);
  std::istringstream in(csv_of(r.trace));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "eval_index,f_value,error,regime,event");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.trace.records.size());
}

TEST(Experiment, SvgHasOneMarkerPerAccept) {
  ExperimentConfig config = default_config(ExperimentKind::Quad);
  config.seed = 2;
  const RunResult r = run_experiment(config);
  std::ostringstream svg;
  write_svg(svg, r.trace);
  const std::string text = svg.str();
  std::size_t circles = 0;
  for (std::size_t pos = 0; (pos = text.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  const auto accepts = std::count_if(r.trace.records.begin(), r.trace.records.end(),
                                     [](const TraceRecord& t) { return t.event == TraceEvent::Accept; });
  EXPECT_EQ(circles, static_cast<std::size_t>(accepts));
  EXPECT_GT(circles, 0u);
}

TEST(Experiment, OutputFilesAndMetaRoundTrip) {
  const auto dir = scratch_dir("outputs");
  ExperimentConfig config = default_config(ExperimentKind::Quad);
  config.seed = 7;
  config.gamma = 0.75;
  config.lipschitz_from_instance = true;
  config.output_path = (dir / "run").string();
  config.emit_svg = true;
  const RunResult r = run_experiment(config);
  EXPECT_TRUE(std::filesystem::exists(dir / "run.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "run.svg"));
  std::ifstream meta_in(dir / "run.meta");
  const auto meta = read_meta(meta_in);
  EXPECT_EQ(meta.at("fingerprint"), r.fingerprint);
  EXPECT_EQ(meta.at("total_evals"), std::to_string(r.trace.total_evals));

  ExperimentConfig again = config_from_meta(meta);
  EXPECT_EQ(again.seed, 7u);
  EXPECT_EQ(again.gamma, 0.75);
  EXPECT_TRUE(again.lipschitz_from_instance);
  again.output_path.clear();
  again.emit_svg = false;
  EXPECT_EQ(csv_of(run_experiment(again).trace), csv_of(r.trace));
}

TEST(Experiment, InstanceFileDrivesTheRun) {
  const auto dir = scratch_dir("instance_file");
  ExperimentConfig config = default_config(ExperimentKind::Quad);
  config.seed = 9;
  const RunResult generated = run_experiment(config);
  Rng rng(9);
  QuadraticInstance inst = make_quadratic(rng);
  inst.seed = 9;
  save_instance(dir / "q.txt", inst);
  config.seed = 1234;
  config.instance_path = dir / "q.txt";
  const RunResult loaded = run_experiment(config);
  EXPECT_EQ(csv_of(loaded.trace), csv_of(generated.trace));
}

TEST(Sweep, EmptyValuesGiveEmptyResult) {
  EXPECT_TRUE(run_sweep(default_config(ExperimentKind::Quad), "gamma", {}).empty());
}

TEST(Sweep, GammaSweepMatchesSingleRuns) {
  ExperimentConfig base = default_config(ExperimentKind::Quad);
  base.seed = 1;
  const std::vector<double> gammas{0.3, 0.6, 0.9};
  const auto rows = run_sweep(base, "gamma", gammas, 3);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    ExperimentConfig c = base;
    c.gamma = gammas[i];
    const RunResult single = run_experiment(c);
    EXPECT_EQ(rows[i].value, gammas[i]);
    EXPECT_EQ(rows[i].total_evals, single.trace.total_evals);
    EXPECT_EQ(rows[i].mb_steps, single.trace.model_based_accepts());
    EXPECT_TRUE(rows[i].error.empty());
  }
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "value,total_evals,mb_steps,mf_steps,converged");
}

TEST(Sweep, UnknownParameterThrows) {
  EXPECT_THROW(run_sweep(default_config(ExperimentKind::Quad), "beta", {0.5}), std::invalid_argument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
