#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/operators.hpp"
#include "srpcr/short_rep.hpp"
#include "srpcr/solvers.hpp"

namespace srpcr {

// l short representations of width kJ. Block b >= 1 is cut by block b-1's
// (u_m, z_m); the last block's (u_m, v_m) deflates the post-iterations.
struct RecycleBasis {
  std::vector<ShortRepresentation> blocks;
  std::vector<BlockBoundary> boundaries;  // per block: (u, z) inner, (u, v) last
  std::vector<long> block_cut;            // boundary index cutting each block, -1 if none
  std::vector<DeflationPair> post_pairs;  // one per source system
  OperatorChain chain_template;           // plain M^{-1} A on the shared counter

  std::size_t block_count() const noexcept { return blocks.size(); }
  std::size_t total_dim() const noexcept;
  std::size_t stored_columns() const noexcept;
  std::size_t projection_mvecs() const noexcept;
};

RecycleBasis build_recycle_basis(const LanczosHarvest& harvest, const OperatorChain& chain_template);

// Multi-source basis: blocks are applied in order, post-iterations deflate
// every source's last pair.
RecycleBasis merge_recycle_bases(RecycleBasis first, const RecycleBasis& second);

struct CostLedger {
  std::size_t stored_columns = 0;
  std::size_t projection_mvecs = 0;
};

CostLedger cost_ledger(const RecycleBasis& basis);
CostLedger cost_ledger(std::size_t blocks, std::size_t k, std::size_t stride);

struct ProjectionResult {
  Vector x;
  Vector r;
};

// x' = x + U U^H A M^{-1} r, r' = r - A (x' - x). r_hat = M^{-1} r is kept in
// sync by the in-place overload (one M^{-1} application).
ProjectionResult recycle_project(const ShortRepresentation& block, std::span<const double> x,
                                 std::span<const double> r);
void recycle_project_inplace(const ShortRepresentation& block, Vector& x, Vector& r, Vector& r_hat);

struct RecycleReport {
  std::size_t blocks_applied = 0;
  std::size_t initial_mvec_a = 0;  // b - A x0, zero for x0 = 0
  std::size_t projection_mvec_a = 0;
  std::size_t projection_mvec_minv = 0;
  std::size_t post_iterations = 0;
  std::vector<double> projection_history;         // ||M^{-1}r||_M before and after each block
  std::vector<std::size_t> projection_mvec_trace;  // cumulative A count at the same points
  std::vector<double> post_history;                // post PCR history, starts after correction
};

struct SrpcrOptions {
  double tol = 1e-8;
  std::size_t max_post_iter = 1000;
  // Relative growth of ||M^{-1}r||_M across a block that triggers
  // orthogonality-collapse.
  double collapse_slack = 1e-8;
  // Sees every post-iteration direction.
  IterationObserver observer;
};

struct SrpcrResult {
  SolveReport report;  // residual_history = projection phase then post phase
  RecycleReport recycle;
};

SrpcrResult srpcr_ap_solve(const RecycleBasis& basis, std::span<const double> b,
                           std::span<const double> x0, const SrpcrOptions& options);

// Little-endian binary archive; see README "Recycle basis archive".
void write_recycle_basis(const RecycleBasis& basis, std::ostream& out);
RecycleBasis read_recycle_basis(std::istream& in, const OperatorChain& chain_template);

}  // namespace srpcr
