#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "srpcr/errors.hpp"
#include "srpcr/linalg.hpp"
#include "srpcr/operators.hpp"

namespace srpcr {

enum class Termination { tolerance_met, max_iter, breakdown };

std::string_view to_string(Termination t) noexcept;

// Histories are absolute; divide by reference_norm for relative values.
// residual_history holds ||M^{-1} r_j||_M = sqrt(<r_j, M^{-1} r_j>).
struct SolveReport {
  std::size_t iterations = 0;
  std::size_t mvec_a = 0;
  std::size_t mvec_minv = 0;
  std::vector<double> residual_history;
  std::vector<double> rhat_norm_history;  // ||M^{-1} r_j||_2, PCR only
  std::vector<double> theta_history;      // theta_j, PCR only
  double reference_norm = 0.0;            // ||M^{-1} b||_M
  Termination termination = Termination::max_iter;
  std::optional<ErrorKind> error;
  std::optional<std::size_t> converged_at;  // first iteration meeting tol
  Vector x;
  Vector r;  // b - A x as maintained by the recurrence (PCR only)

  bool converged() const noexcept { return converged_at.has_value(); }
  double relative(std::size_t j) const noexcept {
    return reference_norm > 0.0 ? residual_history[j] / reference_norm : 0.0;
  }
};

struct HarvestConfig {
  std::size_t stride = 1;      // J
  std::size_t columns = 1;     // k
  std::size_t blocks = 1;      // l
  std::size_t block_width() const noexcept { return stride * columns; }
  std::size_t limit() const noexcept { return stride * columns * blocks; }
  void validate() const;
};

struct BlockBoundary {
  Vector u;  // u_m, normalized
  Vector v;  // v_m = M^{-1} A u_m
  Vector z;  // z_m = M^{-1} A v_m, from the three-term recurrence
};

struct LanczosHarvest {
  HarvestConfig config;
  Tridiagonal t;                                   // entries 1..m plus trailing beta
  std::vector<std::vector<Vector>> strided_columns;  // per block: u_{1+iJ}, i < k
  std::vector<BlockBoundary> boundaries;             // per complete block
  std::size_t complete_blocks() const noexcept { return boundaries.size(); }
};

// Normalized columns u_{j+1}, v_{j+1} produced by iteration j (0-based).
struct IterationView {
  std::size_t index;
  std::span<const double> u;
  std::span<const double> v;
  double theta;
};

using IterationObserver = std::function<void(const IterationView&)>;

struct PcrOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::optional<HarvestConfig> harvest;
  // Keep iterating past tol until the harvest is complete.
  bool continue_until_harvest = true;
  IterationObserver observer;
  // Warm start: r = b - A x0 and r_hat = M^{-1} r supplied by the caller.
  std::optional<Vector> initial_residual;
  std::optional<Vector> initial_rhat;
  std::optional<double> reference_norm;
};

struct PcrResult {
  SolveReport report;
  std::optional<LanczosHarvest> harvest;
};

// Preconditioned conjugate residuals. With deflation pairs on the chain the
// modified operator is used and the iterate is optimal over the combined space.
PcrResult pcr_solve(const OperatorChain& chain, std::span<const double> b,
                    std::span<const double> x0, const PcrOptions& options);

PcrResult pcr_solve(const OperatorChain& chain, std::span<const double> b,
                    std::span<const double> x0, double tol, std::size_t max_iter,
                    std::optional<HarvestConfig> harvest = std::nullopt);

// Preconditioned MINRES, the reference method.
SolveReport pminres_solve(const OperatorChain& chain, std::span<const double> b,
                          std::span<const double> x0, double tol, std::size_t max_iter);

SolveReport pminres_solve(const SparseMatrix& a, const Preconditioner& m,
                          std::span<const double> b, std::span<const double> x0, double tol,
                          std::size_t max_iter);

}  // namespace srpcr
