#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/preconditioner.hpp"
#include "srpcr/sequences.hpp"
#include "srpcr/solvers.hpp"

namespace srpcr {

struct ProblemConfig {
  std::string generator;  // laplace_1d | laplace_2d | shifted_laplace | example31, or empty
  std::size_t n = 16;
  double sigma = 0.0;
  std::optional<double> scale;  // laplace_1d; default 1/(n+1)^2
  std::filesystem::path matrix_market;
  std::filesystem::path rhs_file;  // optional start vector d
};

struct PreconditionerConfig {
  PreconditionerKind kind = PreconditionerKind::identity;
  double shift = 0.0;
};

struct SequenceConfig {
  SequenceKind kind = SequenceKind::b;
  std::size_t q = 5;
  double inner_tol = 1e-12;
  std::string d = "ones-image";  // ones-image | ones | file
};

struct RecycleConfig {
  std::size_t blocks = 2;  // l
  std::size_t k = 4;
  std::size_t stride = 4;  // J
  std::filesystem::path archive_out;
  std::filesystem::path archive_in;
};

struct DiagnosticsConfig {
  bool enabled = false;
  std::size_t band_limit = 200;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemConfig problem;
  PreconditionerConfig preconditioner;
  SequenceConfig sequence;
  RecycleConfig recycle;
  DiagnosticsConfig diagnostics;
  double tol = 1e-8;
  std::size_t max_iter = 2000;
  std::filesystem::path output_dir = "out";
  unsigned threads = 1;

  void validate() const;
};

// JSON text; relative paths resolve against base_dir.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
// SRPCR_OUTPUT_DIR and SRPCR_THREADS.
void apply_env_overrides(ExperimentConfig& config);

struct ExperimentProblem {
  std::shared_ptr<const SparseMatrix> a;
  std::shared_ptr<const Preconditioner> m;
  RhsSequence sequence;
  std::string label;
};

ExperimentProblem build_problem(const ExperimentConfig& config);

struct HistoryRow {
  std::size_t rhs_index = 0;  // 1-based
  std::string phase;          // projection | post | baseline
  std::size_t iteration = 0;
  std::size_t mvec_cumulative = 0;
  double relres = 0.0;
};

void emit_csv(std::span<const HistoryRow> rows, std::ostream& out);
void emit_csv(std::span<const HistoryRow> rows, const std::filesystem::path& path);
std::vector<HistoryRow> parse_history_csv(std::istream& in);

std::vector<HistoryRow> baseline_rows(std::size_t rhs_index, const SolveReport& report);
std::vector<HistoryRow> pcr_rows(std::size_t rhs_index, const SolveReport& report);

struct RhsOutcome {
  std::size_t rhs_index = 0;
  std::size_t baseline_mvecs = 0;
  bool baseline_converged = false;
  double baseline_relres = 0.0;
  std::size_t srpcr_mvecs = 0;
  std::size_t projection_mvecs = 0;
  std::size_t post_iterations = 0;
  bool srpcr_converged = false;
  double srpcr_relres = 0.0;
  bool recycled = false;  // false for the harvesting solve
};

struct ExperimentSummary {
  std::string label;
  std::size_t n = 0;
  std::size_t recycled_blocks = 0;
  std::size_t recycled_dim = 0;
  std::size_t stored_columns = 0;
  std::size_t projection_mvecs = 0;
  std::vector<RhsOutcome> rhs;
  double mean_speedup = 0.0;  // baseline / srpcr MVecs averaged over RHS 2..q
  bool all_converged = false;
  std::vector<std::filesystem::path> files;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);
void write_summary(const ExperimentSummary& summary, std::ostream& out);

// Q and G maps from the harvesting solve of b(1) (log10|.|, CSV).
std::vector<std::filesystem::path> run_diagnostics(const ExperimentConfig& config);
std::filesystem::path run_sequence_dump(const ExperimentConfig& config);

}  // namespace srpcr
