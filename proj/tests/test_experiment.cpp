#include <gtest/gtest.h>

#include <cstdlib>
#include <functional>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "srpcr/errors.hpp"
#include "srpcr/experiment.hpp"

using namespace srpcr;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SRPCR_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("srpcr_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected srpcr::Error";
  return ErrorKind::invalid_argument;
}

const char* kSmall = R"({
  "name": "small",
  "problem": {"generator": "laplace_2d", "n": 10},
  "preconditioner": {"kind": "ic0"},
  "sequence": {"kind": "B", "q": 3},
  "recycle": {"l": 2, "k": 3, "J": 3},
  "tol": 1e-8
})";

}  // namespace

TEST(Config, ParsesAndValidates) {
  const ExperimentConfig cfg = parse_config(kSmall);
  EXPECT_EQ(cfg.problem.generator, "laplace_2d");
  EXPECT_EQ(cfg.recycle.stride, 3u);
  EXPECT_EQ(cfg.sequence.kind, SequenceKind::b);
  EXPECT_NO_THROW(cfg.validate());
  ExperimentConfig bad = cfg;
  bad.recycle.stride = 0;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::invalid_argument);
  bad = cfg;
  bad.tol = 1.5;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::invalid_argument);
}

TEST(Config, RejectsUnknownKeysAndBadJson) {
  EXPECT_EQ(kind_of([] { parse_config(R"({"problem": {"generator": "laplace_2d", "nn": 4}})"); }),
            ErrorKind::parse_error);
  EXPECT_EQ(kind_of([] { parse_config("{not json"); }), ErrorKind::parse_error);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path()).validate()) << entry.path();
  }
}

TEST(Config, EnvOverrides) {
  ExperimentConfig cfg = parse_config(kSmall);
  ::setenv("SRPCR_OUTPUT_DIR", "/tmp/override_here", 1);
  ::setenv("SRPCR_THREADS", "3", 1);
  apply_env_overrides(cfg);
  EXPECT_EQ(cfg.output_dir, fs::path("/tmp/override_here"));
  EXPECT_EQ(cfg.threads, 3u);
  ::setenv("SRPCR_THREADS", "zero", 1);
  EXPECT_EQ(kind_of([&] { apply_env_overrides(cfg); }), ErrorKind::invalid_argument);
  ::unsetenv("SRPCR_OUTPUT_DIR");
  ::unsetenv("SRPCR_THREADS");
}

TEST(HistoryCsv, RoundTrip) {
  const std::vector<HistoryRow> rows{{1, "baseline", 0, 0, 1.0}, {2, "projection", 1, 8, 0.1 + 0.2},
                                     {2, "post", 0, 8, 3.0e-9}};
  std::stringstream s;
  emit_csv(rows, s);
  const auto back = parse_history_csv(s);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].rhs_index, rows[i].rhs_index);
    EXPECT_EQ(back[i].phase, rows[i].phase);
    EXPECT_EQ(back[i].iteration, rows[i].iteration);
    EXPECT_EQ(back[i].mvec_cumulative, rows[i].mvec_cumulative);
    EXPECT_EQ(back[i].relres, rows[i].relres);
  }
  std::stringstream bad("rhs,phase\n");
  EXPECT_EQ(kind_of([&] { parse_history_csv(bad); }), ErrorKind::parse_error);
}

TEST(HistoryCsv, ZeroIterationSolve) {
  SolveReport rep;
  rep.residual_history = {0.0};
  const auto rows = baseline_rows(1, rep);
  std::stringstream s;
  emit_csv(rows, s);
  std::string line;
  int lines = 0;
  while (std::getline(s, line)) ++lines;
  EXPECT_EQ(lines, 2);
}

TEST(Experiment, LaplaceSequenceBLedger) {
  ExperimentConfig cfg = load_config(kConfigs / "laplace2d_16_seqB.json");
  cfg.output_dir = scratch("l16");
  const ExperimentSummary s = run_experiment(cfg);
  EXPECT_EQ(s.n, 256u);
  EXPECT_EQ(s.stored_columns, 12u);
  EXPECT_EQ(s.projection_mvecs, 16u);
  EXPECT_EQ(s.recycled_dim, 32u);
  EXPECT_TRUE(s.all_converged);
  ASSERT_EQ(s.rhs.size(), 5u);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(s.rhs[i].projection_mvecs, 16u);
    EXPECT_EQ(s.rhs[i].srpcr_mvecs, 16u + s.rhs[i].post_iterations);
  }
  for (const auto& f : s.files) EXPECT_TRUE(fs::exists(f)) << f;
  std::ifstream csv(cfg.output_dir / "srpcr_rhs02.csv");
  const auto rows = parse_history_csv(csv);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front().phase, "projection");
  EXPECT_EQ(rows.back().phase, "post");
  EXPECT_LE(rows.back().relres, cfg.tol);
}

TEST(Experiment, ByteIdenticalReruns) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.output_dir = scratch("det1");
  run_experiment(cfg);
  ExperimentConfig again = cfg;
  again.output_dir = scratch("det2");
  run_experiment(again);
  for (const auto& entry : fs::directory_iterator(cfg.output_dir)) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(again.output_dir / entry.path().filename())) << entry.path();
  }
}

TEST(Experiment, Example31RecyclingDoesNotHelp) {
  ExperimentConfig cfg = load_config(kConfigs / "example31.json");
  cfg.output_dir = scratch("ex31");
  const ExperimentSummary s = run_experiment(cfg);
  ASSERT_EQ(s.rhs.size(), 2u);
  EXPECT_TRUE(s.all_converged);
  EXPECT_LE(s.rhs[1].post_iterations, s.rhs[1].baseline_mvecs + 1);
  EXPECT_GE(s.rhs[1].post_iterations + 1, s.rhs[1].baseline_mvecs);
}

TEST(Experiment, ArchiveReuse) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.output_dir = scratch("arc1");
  cfg.recycle.archive_out = cfg.output_dir / "basis.srpcr";
  const ExperimentSummary first = run_experiment(cfg);
  ExperimentConfig reuse = parse_config(kSmall);
  reuse.output_dir = scratch("arc2");
  reuse.recycle.archive_in = cfg.recycle.archive_out;
  const ExperimentSummary second = run_experiment(reuse);
  EXPECT_TRUE(second.rhs[0].recycled);
  for (std::size_t i = 1; i < first.rhs.size(); ++i) {
    EXPECT_EQ(first.rhs[i].srpcr_mvecs, second.rhs[i].srpcr_mvecs);
  }
}

TEST(Experiment, DiagnosticsWriteMaps) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.output_dir = scratch("diag");
  cfg.diagnostics.band_limit = 8;
  const auto files = run_diagnostics(cfg);
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) EXPECT_GT(fs::file_size(f), 0u);
  EXPECT_TRUE(fs::exists(run_sequence_dump(cfg)));
}

#ifdef SRPCR_CLI_PATH
namespace {
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SRPCR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << kSmall;
    std::ofstream(dir / "bad.json") << R"({"problem": {"generator": "laplace_2d"}, "recycle": {"J": 0}})";
    std::ofstream(dir / "slow.json") << R"({"problem": {"generator": "laplace_2d", "n": 20},
      "sequence": {"kind": "C", "q": 2}, "recycle": {"l": 1, "k": 1, "J": 1}, "max_iter": 3})";
  }
  EXPECT_EQ(run_cli("run " + (dir / "ok.json").string() + " -o " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_EQ(run_cli("run " + (dir / "slow.json").string() + " -o " + (dir / "out2").string()), 1);
  EXPECT_EQ(run_cli("run " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "missing.json").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);
}
#endif
