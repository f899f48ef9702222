#include "srpcr/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "srpcr/diagnostics.hpp"
#include "srpcr/errors.hpp"
#include "srpcr/problem_io.hpp"
#include "srpcr/recycling.hpp"

namespace srpcr {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::parse_error, where + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail(ErrorKind::parse_error, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::parse_error, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::size_t read_count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(ErrorKind::parse_error, std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

PreconditionerKind parse_preconditioner_kind(const std::string& name) {
  if (name == "identity") return PreconditionerKind::identity;
  if (name == "jacobi") return PreconditionerKind::jacobi;
  if (name == "signed-tridiagonal" || name == "signed_tridiagonal") return PreconditionerKind::signed_tridiagonal;
  if (name == "ic0") return PreconditionerKind::ic0;
  fail(ErrorKind::parse_error, "unknown preconditioner kind '" + name + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string rhs_file_name(const char* method, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_rhs%02zu.csv", method, index);
  return buf;
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Convergence curves from the CSV histories next to this script.

Thick black line: first right-hand side. Thin grey lines: later ones.
"""
import csv
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    mvecs = [int(r["mvec_cumulative"]) for r in rows]
    relres = [max(float(r["relres"]), 1e-300) for r in rows]
    return int(rows[0]["rhs_index"]), mvecs, relres


fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, method in zip(axes, ("pminres", "srpcr")):
    for path in sorted(glob.glob(os.path.join(here, method + "_rhs*.csv"))):
        rhs, mvecs, relres = load(path)
        first = rhs == 1
        ax.semilogy(mvecs, relres, color="black" if first else "0.55",
                    linewidth=2.2 if first else 0.8)
    ax.set_title(method)
    ax.set_xlabel("MVecs")
    ax.grid(True, which="both", alpha=0.3)
axes[0].set_ylabel("relative preconditioned residual")
fig.tight_layout()
out = os.path.join(here, "convergence.png")
fig.savefig(out, dpi=150)
print(out)
)PY";

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

std::shared_ptr<MvecCounter> fresh_counter() { return std::make_shared<MvecCounter>(); }

}  // namespace

void ExperimentConfig::validate() const {
  const bool has_file = !problem.matrix_market.empty();
  const bool has_gen = !problem.generator.empty();
  if (has_file == has_gen) fail(ErrorKind::invalid_argument, "problem needs exactly one of generator or matrix_market");
  if (has_gen) {
    static const std::set<std::string> gens{"laplace_1d", "laplace_2d", "shifted_laplace", "example31"};
    if (!gens.count(problem.generator)) fail(ErrorKind::invalid_argument, "unknown generator '" + problem.generator + "'");
    if (problem.n < 2) fail(ErrorKind::invalid_argument, "problem.n must be >= 2");
  }
  const bool ex31_gen = problem.generator == "example31";
  const bool ex31_seq = sequence.kind == SequenceKind::example31;
  if (ex31_gen != ex31_seq) fail(ErrorKind::invalid_argument, "example31 generator and sequence go together");
  if (recycle.blocks < 1 || recycle.k < 1 || recycle.stride < 1) {
    fail(ErrorKind::invalid_argument, "recycle needs l >= 1, k >= 1, J >= 1");
  }
  if (!(tol > 0.0) || tol >= 1.0) fail(ErrorKind::invalid_argument, "tol must lie in (0, 1)");
  if (max_iter < 1) fail(ErrorKind::invalid_argument, "max_iter must be >= 1");
  if (recycle.blocks * recycle.k * recycle.stride > max_iter) {
    fail(ErrorKind::invalid_argument, "l*k*J exceeds max_iter of the first solve");
  }
  if (!ex31_seq && sequence.q < 1) fail(ErrorKind::invalid_argument, "sequence.q must be >= 1");
  if (!(sequence.inner_tol > 0.0)) fail(ErrorKind::invalid_argument, "sequence.inner_tol must be positive");
  if (sequence.d != "ones-image" && sequence.d != "ones" && sequence.d != "file") {
    fail(ErrorKind::invalid_argument, "sequence.d must be ones-image, ones or file");
  }
  if (sequence.d == "file" && problem.rhs_file.empty()) {
    fail(ErrorKind::invalid_argument, "sequence.d = file needs problem.rhs_file");
  }
  if (preconditioner.shift < 0.0) fail(ErrorKind::invalid_argument, "preconditioner.shift must be >= 0");
  if (diagnostics.band_limit < 1) fail(ErrorKind::invalid_argument, "diagnostics.band_limit must be >= 1");
  if (threads < 1) fail(ErrorKind::invalid_argument, "threads must be >= 1");
  if (output_dir.empty()) fail(ErrorKind::invalid_argument, "output_dir must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse_error, std::string("config: ") + e.what());
  }
  check_keys(root, {"name", "problem", "preconditioner", "sequence", "recycle", "diagnostics", "tol",
                    "max_iter", "output_dir", "threads"},
             "config");
  ExperimentConfig cfg;
  read_opt(root, "name", cfg.name);
  read_opt(root, "tol", cfg.tol);
  cfg.max_iter = read_count(root, "max_iter", cfg.max_iter);
  cfg.threads = static_cast<unsigned>(read_count(root, "threads", cfg.threads));
  std::string out_dir = cfg.output_dir.string();
  read_opt(root, "output_dir", out_dir);
  cfg.output_dir = resolve(base_dir, out_dir);

  if (!root.contains("problem")) fail(ErrorKind::parse_error, "config needs a problem section");
  const json& p = root.at("problem");
  check_keys(p, {"generator", "n", "sigma", "scale", "matrix_market", "rhs_file"}, "problem");
  read_opt(p, "generator", cfg.problem.generator);
  cfg.problem.n = read_count(p, "n", cfg.problem.n);
  read_opt(p, "sigma", cfg.problem.sigma);
  if (p.contains("scale")) {
    double s = 0.0;
    read_opt(p, "scale", s);
    cfg.problem.scale = s;
  }
  std::string mm, rhs;
  read_opt(p, "matrix_market", mm);
  read_opt(p, "rhs_file", rhs);
  cfg.problem.matrix_market = resolve(base_dir, mm);
  cfg.problem.rhs_file = resolve(base_dir, rhs);

  if (root.contains("preconditioner")) {
    const json& m = root.at("preconditioner");
    check_keys(m, {"kind", "shift"}, "preconditioner");
    std::string kind = "identity";
    read_opt(m, "kind", kind);
    cfg.preconditioner.kind = parse_preconditioner_kind(kind);
    read_opt(m, "shift", cfg.preconditioner.shift);
  }
  if (root.contains("sequence")) {
    const json& s = root.at("sequence");
    check_keys(s, {"kind", "q", "inner_tol", "d"}, "sequence");
    std::string kind = "B";
    read_opt(s, "kind", kind);
    cfg.sequence.kind = parse_sequence_kind(kind);
    cfg.sequence.q = read_count(s, "q", cfg.sequence.q);
    read_opt(s, "inner_tol", cfg.sequence.inner_tol);
    read_opt(s, "d", cfg.sequence.d);
  }
  if (root.contains("recycle")) {
    const json& r = root.at("recycle");
    check_keys(r, {"l", "k", "J", "archive_out", "archive_in"}, "recycle");
    cfg.recycle.blocks = read_count(r, "l", cfg.recycle.blocks);
    cfg.recycle.k = read_count(r, "k", cfg.recycle.k);
    cfg.recycle.stride = read_count(r, "J", cfg.recycle.stride);
    std::string a_out, a_in;
    read_opt(r, "archive_out", a_out);
    read_opt(r, "archive_in", a_in);
    cfg.recycle.archive_out = resolve(base_dir, a_out);
    cfg.recycle.archive_in = resolve(base_dir, a_in);
  }
  if (root.contains("diagnostics")) {
    const json& d = root.at("diagnostics");
    check_keys(d, {"enabled", "band_limit"}, "diagnostics");
    read_opt(d, "enabled", cfg.diagnostics.enabled);
    cfg.diagnostics.band_limit = read_count(d, "band_limit", cfg.diagnostics.band_limit);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* dir = std::getenv("SRPCR_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  if (const char* th = std::getenv("SRPCR_THREADS"); th && *th) {
    char* end = nullptr;
    const long v = std::strtol(th, &end, 10);
    if (*end != '\0' || v < 1) fail(ErrorKind::invalid_argument, "SRPCR_THREADS must be a positive integer");
    config.threads = static_cast<unsigned>(v);
  }
}

ExperimentProblem build_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentProblem prob;
  std::shared_ptr<SparseMatrix> a;
  const auto& p = cfg.problem;
  if (p.generator == "example31") {
    Example31 ex = gen_example31(p.n);
    a = std::make_shared<SparseMatrix>(std::move(ex.a));
    prob.sequence = RhsSequence{SequenceKind::example31, {ex.b1, ex.b2}, ex.b1, cfg.sequence.inner_tol};
    prob.label = "example31(" + std::to_string(p.n) + ")";
  } else {
    if (p.generator == "laplace_1d") {
      const double h = 1.0 / static_cast<double>(p.n + 1);
      a = std::make_shared<SparseMatrix>(gen_laplace_1d(p.n, p.scale.value_or(h * h)));
      prob.label = "laplace_1d(" + std::to_string(p.n) + ")";
    } else if (p.generator == "laplace_2d") {
      a = std::make_shared<SparseMatrix>(gen_laplace_2d(p.n));
      prob.label = "laplace_2d(" + std::to_string(p.n) + ")";
    } else if (p.generator == "shifted_laplace") {
      a = std::make_shared<SparseMatrix>(gen_shifted_laplace(p.n, p.sigma));
      prob.label = "shifted_laplace(" + std::to_string(p.n) + "," + format_double(p.sigma) + ")";
    } else {
      a = std::make_shared<SparseMatrix>(read_matrix_market(p.matrix_market));
      prob.label = p.matrix_market.filename().string();
    }
  }
  prob.a = a;
  switch (cfg.preconditioner.kind) {
    case PreconditionerKind::identity: prob.m = std::make_shared<Preconditioner>(make_identity(a->rows())); break;
    case PreconditionerKind::jacobi: prob.m = std::make_shared<Preconditioner>(make_jacobi(*a)); break;
    case PreconditionerKind::signed_tridiagonal:
      prob.m = std::make_shared<Preconditioner>(make_signed_tridiag(*a));
      break;
    case PreconditionerKind::ic0:
      prob.m = std::make_shared<Preconditioner>(make_ic0(*a, cfg.preconditioner.shift));
      break;
  }
  if (cfg.sequence.kind != SequenceKind::example31) {
    Vector d;
    if (cfg.sequence.d == "file") {
      d = read_matrix_market_vector(p.rhs_file);
      check_same_size(d.size(), a->rows(), "rhs_file");
    } else if (cfg.sequence.d == "ones") {
      d.assign(a->rows(), 1.0);
    } else {
      d = ones_image(*a);
    }
    if (norm2(d) == 0.0) fail(ErrorKind::invalid_argument, "sequence start vector d is zero");
    prob.sequence = gen_sequence(cfg.sequence.kind, *a, *prob.m, d, cfg.sequence.q, cfg.sequence.inner_tol);
  }
  return prob;
}

void emit_csv(std::span<const HistoryRow> rows, std::ostream& out) {
  out << "rhs_index,phase,iteration,mvec_cumulative,relres\n";
  for (const auto& r : rows) {
    out << r.rhs_index << ',' << r.phase << ',' << r.iteration << ',' << r.mvec_cumulative << ','
        << format_double(r.relres) << '\n';
  }
  if (!out) fail(ErrorKind::io_error, "csv write failed");
}

void emit_csv(std::span<const HistoryRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  emit_csv(rows, out);
}

std::vector<HistoryRow> parse_history_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "rhs_index,phase,iteration,mvec_cumulative,relres") {
    fail(ErrorKind::parse_error, "history csv: bad header");
  }
  std::vector<HistoryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, f[i], ',')) fail(ErrorKind::parse_error, "history csv line " + std::to_string(line_no));
    }
    HistoryRow r;
    try {
      r.rhs_index = std::stoull(f[0]);
      r.phase = f[1];
      r.iteration = std::stoull(f[2]);
      r.mvec_cumulative = std::stoull(f[3]);
      r.relres = std::strtod(f[4].c_str(), nullptr);
    } catch (const std::exception&) {
      fail(ErrorKind::parse_error, "history csv line " + std::to_string(line_no));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<HistoryRow> baseline_rows(std::size_t rhs_index, const SolveReport& rep) {
  std::vector<HistoryRow> rows;
  const std::size_t init = rep.mvec_a - rep.iterations;  // b - A x0 when x0 != 0
  for (std::size_t j = 0; j < rep.residual_history.size(); ++j) {
    rows.push_back({rhs_index, "baseline", j, init + j, rep.relative(j)});
  }
  return rows;
}

std::vector<HistoryRow> pcr_rows(std::size_t rhs_index, const SolveReport& rep) {
  std::vector<HistoryRow> rows;
  const std::size_t init = rep.mvec_a - rep.iterations;
  for (std::size_t j = 0; j < rep.residual_history.size(); ++j) {
    rows.push_back({rhs_index, "post", j, init + j, rep.relative(j)});
  }
  return rows;
}

namespace {

std::vector<HistoryRow> srpcr_rows(std::size_t rhs_index, const SrpcrResult& res) {
  std::vector<HistoryRow> rows;
  const auto& rec = res.recycle;
  const double ref = res.report.reference_norm;
  auto rel = [ref](double x) { return ref > 0.0 ? x / ref : 0.0; };
  for (std::size_t b = 0; b < rec.projection_history.size(); ++b) {
    rows.push_back({rhs_index, "projection", b, rec.projection_mvec_trace[b], rel(rec.projection_history[b])});
  }
  const std::size_t base = rec.projection_mvec_trace.back();
  for (std::size_t j = 0; j < rec.post_history.size(); ++j) {
    rows.push_back({rhs_index, "post", j, base + j, rel(rec.post_history[j])});
  }
  return rows;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentProblem prob = build_problem(cfg);
  ensure_dir(cfg.output_dir);
  const auto& rhs = prob.sequence.vectors;
  const std::size_t n = prob.a->rows();
  const Vector zero(n, 0.0);

  ExperimentSummary sum;
  sum.label = prob.label;
  sum.n = n;
  sum.rhs.resize(rhs.size());

  for (std::size_t i = 0; i < rhs.size(); ++i) {
    OperatorChain chain(prob.a, prob.m, fresh_counter());
    SolveReport rep = pminres_solve(chain, rhs[i], zero, cfg.tol, cfg.max_iter);
    RhsOutcome& out = sum.rhs[i];
    out.rhs_index = i + 1;
    out.baseline_mvecs = rep.mvec_a;
    out.baseline_converged = rep.converged();
    out.baseline_relres = rep.relative(rep.residual_history.size() - 1);
    auto path = cfg.output_dir / rhs_file_name("pminres", i + 1);
    emit_csv(baseline_rows(i + 1, rep), path);
    sum.files.push_back(path);
  }

  OperatorChain plain(prob.a, prob.m, fresh_counter());
  std::optional<RecycleBasis> basis;
  std::size_t first_recycled = 1;
  if (!cfg.recycle.archive_in.empty()) {
    std::ifstream in(cfg.recycle.archive_in, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot open archive " + cfg.recycle.archive_in.string());
    basis = read_recycle_basis(in, plain);
    first_recycled = 0;
  } else {
    HarvestConfig hc{cfg.recycle.stride, cfg.recycle.k, cfg.recycle.blocks};
    PcrOptions opt;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.harvest = hc;
    PcrResult first = pcr_solve(plain, rhs[0], zero, opt);
    RhsOutcome& out = sum.rhs[0];
    out.srpcr_mvecs = first.report.mvec_a;
    out.post_iterations = first.report.iterations;
    out.srpcr_converged = first.report.converged();
    out.srpcr_relres = first.report.relative(first.report.residual_history.size() - 1);
    auto path = cfg.output_dir / rhs_file_name("srpcr", 1);
    emit_csv(pcr_rows(1, first.report), path);
    sum.files.push_back(path);
    if (first.harvest->complete_blocks() == 0) {
      fail(ErrorKind::invalid_argument,
           "first solve ended before one block (k*J columns plus one) was harvested; shrink k or J");
    }
    basis = build_recycle_basis(*first.harvest, plain);
  }
  if (!cfg.recycle.archive_out.empty()) {
    ensure_dir(cfg.recycle.archive_out.parent_path().empty() ? "." : cfg.recycle.archive_out.parent_path());
    std::ofstream out(cfg.recycle.archive_out, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot write archive " + cfg.recycle.archive_out.string());
    write_recycle_basis(*basis, out);
  }
  sum.recycled_blocks = basis->block_count();
  sum.recycled_dim = basis->total_dim();
  const CostLedger ledger = cost_ledger(*basis);
  sum.stored_columns = ledger.stored_columns;
  sum.projection_mvecs = ledger.projection_mvecs;

  SrpcrOptions sopt;
  sopt.tol = cfg.tol;
  sopt.max_post_iter = cfg.max_iter;
  for (std::size_t i = first_recycled; i < rhs.size(); ++i) {
    basis->chain_template.counter().reset();
    SrpcrResult res = srpcr_ap_solve(*basis, rhs[i], zero, sopt);
    RhsOutcome& out = sum.rhs[i];
    out.recycled = true;
    out.srpcr_mvecs = res.report.mvec_a;
    out.projection_mvecs = res.recycle.projection_mvec_a;
    out.post_iterations = res.recycle.post_iterations;
    out.srpcr_converged = res.report.termination == Termination::tolerance_met;
    out.srpcr_relres = res.report.relative(res.report.residual_history.size() - 1);
    auto path = cfg.output_dir / rhs_file_name("srpcr", i + 1);
    emit_csv(srpcr_rows(i + 1, res), path);
    sum.files.push_back(path);
  }

  double speedup = 0.0;
  std::size_t counted = 0;
  sum.all_converged = true;
  for (const auto& r : sum.rhs) {
    sum.all_converged = sum.all_converged && r.baseline_converged && r.srpcr_converged;
    if (r.rhs_index >= 2 && r.srpcr_mvecs > 0) {
      speedup += static_cast<double>(r.baseline_mvecs) / static_cast<double>(r.srpcr_mvecs);
      ++counted;
    }
  }
  sum.mean_speedup = counted > 0 ? speedup / static_cast<double>(counted) : 0.0;

  {
    auto path = cfg.output_dir / "summary.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
    write_summary(sum, out);
    sum.files.push_back(path);
  }
  {
    auto path = cfg.output_dir / "plot_convergence.py";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
    out << kPlotScript;
    sum.files.push_back(path);
  }
  if (cfg.diagnostics.enabled) {
    auto maps = run_diagnostics(cfg);
    sum.files.insert(sum.files.end(), maps.begin(), maps.end());
  }
  return sum;
}

void write_summary(const ExperimentSummary& s, std::ostream& out) {
  out << "# problem," << s.label << "\n";
  out << "# n," << s.n << "\n";
  out << "# recycled_blocks," << s.recycled_blocks << "\n";
  out << "# recycled_dim," << s.recycled_dim << "\n";
  out << "# stored_columns," << s.stored_columns << "\n";
  out << "# projection_mvecs," << s.projection_mvecs << "\n";
  out << "# mean_speedup_rhs2_to_q," << format_double(s.mean_speedup) << "\n";
  out << "# all_converged," << (s.all_converged ? "true" : "false") << "\n";
  out << "rhs_index,pminres_mvecs,pminres_converged,pminres_relres,srpcr_mvecs,srpcr_projection_mvecs,"
         "srpcr_post_iterations,srpcr_converged,srpcr_relres,speedup\n";
  for (const auto& r : s.rhs) {
    const double sp = r.srpcr_mvecs > 0 ? static_cast<double>(r.baseline_mvecs) / static_cast<double>(r.srpcr_mvecs) : 0.0;
    out << r.rhs_index << ',' << r.baseline_mvecs << ',' << (r.baseline_converged ? 1 : 0) << ','
        << format_double(r.baseline_relres) << ',' << r.srpcr_mvecs << ',' << r.projection_mvecs << ','
        << r.post_iterations << ',' << (r.srpcr_converged ? 1 : 0) << ',' << format_double(r.srpcr_relres) << ','
        << format_double(sp) << '\n';
  }
}

std::vector<std::filesystem::path> run_diagnostics(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentProblem prob = build_problem(cfg);
  ensure_dir(cfg.output_dir);
  const std::size_t n = prob.a->rows();
  const std::size_t m = cfg.recycle.blocks * cfg.recycle.k * cfg.recycle.stride;
  if (m > kMaxDiagnosticColumns) fail(ErrorKind::memory_guard, "diagnostics limited to 2000 harvested columns");

  std::vector<Vector> v_cols;
  PcrOptions opt;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  opt.harvest = HarvestConfig{cfg.recycle.stride, cfg.recycle.k, cfg.recycle.blocks};
  opt.observer = [&](const IterationView& it) {
    if (it.index < m) v_cols.emplace_back(it.v.begin(), it.v.end());
  };
  OperatorChain chain(prob.a, prob.m);
  PcrResult res = pcr_solve(chain, prob.sequence.vectors[0], Vector(n, 0.0), opt);
  const Tridiagonal& t = res.harvest->t;
  v_cols.resize(std::min(v_cols.size(), t.size()));
  if (t.size() == 0) fail(ErrorKind::invalid_argument, "harvest produced no T entries");

  std::vector<std::filesystem::path> files;
  auto q_path = cfg.output_dir / "q_map.csv";
  {
    std::ofstream out(q_path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot write " + q_path.string());
    write_dense_csv(log10_abs(compute_q(*prob.m, v_cols)), out);
  }
  files.push_back(q_path);
  auto g_path = cfg.output_dir / "g_map.csv";
  {
    std::ofstream out(g_path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot write " + g_path.string());
    write_dense_csv(log10_abs(compute_g(t, cfg.diagnostics.band_limit, cfg.threads)), out);
  }
  files.push_back(g_path);
  return files;
}

std::filesystem::path run_sequence_dump(const ExperimentConfig& cfg) {
  ExperimentProblem prob = build_problem(cfg);
  ensure_dir(cfg.output_dir);
  auto path = cfg.output_dir / "sequence.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  const auto& vs = prob.sequence.vectors;
  out << "row";
  for (std::size_t i = 0; i < vs.size(); ++i) out << ",b" << i + 1;
  out << '\n';
  for (std::size_t r = 0; r < prob.a->rows(); ++r) {
    out << r + 1;
    for (const auto& v : vs) out << ',' << format_double(v[r]);
    out << '\n';
  }
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
  return path;
}

}  // namespace srpcr
