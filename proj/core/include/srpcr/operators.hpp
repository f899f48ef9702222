#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/preconditioner.hpp"

namespace srpcr {

struct MvecCount {
  std::size_t a = 0;
  std::size_t minv = 0;
};

class MvecCounter {
 public:
  void add_a(std::size_t n = 1) noexcept { a_.fetch_add(n, std::memory_order_relaxed); }
  void add_minv(std::size_t n = 1) noexcept { minv_.fetch_add(n, std::memory_order_relaxed); }
  MvecCount snapshot() const noexcept {
    return {a_.load(std::memory_order_relaxed), minv_.load(std::memory_order_relaxed)};
  }
  void reset() noexcept {
    a_.store(0);
    minv_.store(0);
  }

 private:
  std::atomic<std::size_t> a_{0};
  std::atomic<std::size_t> minv_{0};
};

// Boundary pair (u_m, v_m) of a Lanczos block: normalized u_m and its image
// v_m = M^{-1} A u_m. d_m = A u_m is never stored.
struct DeflationPair {
  Vector u;
  Vector v;
};

// Output-side cut (u_m, z_m) with z_m = M^{-1} A v_m. The operator
// w -> M^{-1}A w - u_m <z_m, A w> removes the u_m coefficient a block's
// Lanczos recurrence would otherwise pick up from its predecessor.
struct CutPair {
  Vector u;
  Vector z;
};

// M^{-1} A with optional deflation / cut corrections and shared MVec
// accounting. Copies share the counter.
class OperatorChain {
 public:
  OperatorChain(std::shared_ptr<const SparseMatrix> a, std::shared_ptr<const Preconditioner> m,
                std::shared_ptr<MvecCounter> counter = nullptr);

  OperatorChain with_deflations(std::vector<DeflationPair> pairs) const;
  OperatorChain with_cuts(std::vector<CutPair> cuts) const;
  OperatorChain with_counter(std::shared_ptr<MvecCounter> counter) const;

  std::size_t size() const noexcept { return a_->rows(); }
  const SparseMatrix& matrix() const noexcept { return *a_; }
  const Preconditioner& preconditioner() const noexcept { return *m_; }
  const std::shared_ptr<const SparseMatrix>& matrix_ptr() const noexcept { return a_; }
  const std::shared_ptr<const Preconditioner>& preconditioner_ptr() const noexcept { return m_; }
  const std::vector<DeflationPair>& deflations() const noexcept { return deflations_; }
  const std::vector<CutPair>& cuts() const noexcept { return cuts_; }
  MvecCounter& counter() const noexcept { return *counter_; }
  const std::shared_ptr<MvecCounter>& counter_ptr() const noexcept { return counter_; }

  // Counted primitives.
  Vector apply_a(std::span<const double> x) const;
  Vector apply_minv(std::span<const double> x) const;

 private:
  std::shared_ptr<const SparseMatrix> a_;
  std::shared_ptr<const Preconditioner> m_;
  std::shared_ptr<MvecCounter> counter_;
  std::vector<DeflationPair> deflations_;
  std::vector<CutPair> cuts_;
};

struct AFuncResult {
  Vector v_hat;
  Vector d_hat;
  Vector u_hat;
};

// u = r, d = A r, v = M^{-1} d.
AFuncResult a_func(const OperatorChain& chain, std::span<const double> r_hat);

// a_func followed by gamma = <v_m, d>, v -= gamma v_m, u -= gamma u_m per
// deflation pair. Caller guarantees r_hat is already orthogonal to the
// deflated images; checked only in debug builds.
AFuncResult mod_a_func(const OperatorChain& chain, std::span<const double> r_hat);

// M^{-1} A w - sum v_m <v_m, A w> - sum u_m <z_m, A w>.
Vector chain_forward(const OperatorChain& chain, std::span<const double> w);

// Euclidean adjoint of chain_forward:
// A (M^{-1} z - sum v_m <v_m, z> - sum z_m <u_m, z>).
Vector chain_adjoint(const OperatorChain& chain, std::span<const double> z);

}  // namespace srpcr
