#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "srpcr/linalg.hpp"

namespace srpcr {

enum class PreconditionerKind { identity, jacobi, signed_tridiagonal, ic0 };

std::string_view to_string(PreconditionerKind kind) noexcept;

// Hermitian positive definite M, applied as M^{-1} (solver path) or M (tests,
// diagnostics). Immutable after construction.
class Preconditioner {
 public:
  static Preconditioner identity(std::size_t n);
  static Preconditioner jacobi(const SparseMatrix& a);
  static Preconditioner signed_tridiagonal(const SparseMatrix& a);
  static Preconditioner ic0(const SparseMatrix& a, double shift = 0.0);

  PreconditionerKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return n_; }
  // Diagonal shift that made the IC(0) factorization succeed (0 otherwise).
  double shift_used() const noexcept { return shift_used_; }

  void apply_inv(std::span<const double> x, std::span<double> y) const;
  void apply_fwd(std::span<const double> x, std::span<double> y) const;
  Vector apply_inv(std::span<const double> x) const;
  Vector apply_fwd(std::span<const double> x) const;

 private:
  Preconditioner(PreconditionerKind kind, std::size_t n) : kind_(kind), n_(n) {}

  PreconditionerKind kind_;
  std::size_t n_;
  double shift_used_ = 0.0;
  // jacobi: diag_. signed tridiagonal: band (diag_, off_) and its LDL^T
  // factors (ldl_d_, ldl_l_). ic0: lower factor L in CSR, diagonal last per row.
  Vector diag_;
  Vector off_;
  Vector ldl_d_;
  Vector ldl_l_;
  std::vector<std::size_t> l_offsets_;
  std::vector<std::size_t> l_cols_;
  Vector l_vals_;
};

Preconditioner make_identity(std::size_t n);
Preconditioner make_jacobi(const SparseMatrix& a);
Preconditioner make_signed_tridiag(const SparseMatrix& a);
Preconditioner make_ic0(const SparseMatrix& a, double shift = 0.0);

}  // namespace srpcr
