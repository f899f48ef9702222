#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/operators.hpp"

namespace srpcr {

// Pi e_{iJ+j} = e_{jk+i} (0-based), i < k, j < J. Never materialized.
class Permutation {
 public:
  Permutation(std::size_t k, std::size_t stride);

  std::size_t k() const noexcept { return k_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t size() const noexcept { return k_ * stride_; }
  std::size_t forward_index(std::size_t p) const noexcept {
    return (p % stride_) * k_ + p / stride_;
  }

  Vector permute_forward(std::span<const double> y) const;
  Vector permute_back(std::span<const double> y) const;

 private:
  std::size_t k_;
  std::size_t stride_;
};

// Upper triangular R with column iJ+j = T^j e_{iJ}, restricted to the block.
// Columns are stored as contiguous bands [first_row, p].
class RFactor {
 public:
  std::size_t size() const noexcept { return first_row_.size(); }
  std::size_t first_row(std::size_t col) const { return first_row_[col]; }
  std::span<const double> column(std::size_t col) const;
  double at(std::size_t row, std::size_t col) const;
  std::size_t structural_nonzeros(std::size_t col) const;

  Vector solve(std::span<const double> y) const;            // R c = y
  Vector solve_transpose(std::span<const double> y) const;  // R^T c = y

 private:
  friend RFactor build_r_factor(const Tridiagonal& t_block, std::size_t k, std::size_t stride);
  std::vector<std::size_t> first_row_;
  std::vector<std::size_t> offsets_;
  Vector values_;
};

RFactor build_r_factor(const Tridiagonal& t_block, std::size_t k, std::size_t stride);

inline Vector permute_forward(const Permutation& p, std::span<const double> y) {
  return p.permute_forward(y);
}
inline Vector permute_back(const Permutation& p, std::span<const double> y) {
  return p.permute_back(y);
}

// U_block R = K_J(chain; U_tilde) Pi.
struct ShortRepresentation {
  std::vector<Vector> u_tilde;  // k stored columns
  Tridiagonal t_block;          // kJ x kJ section R was built from
  RFactor r;
  Permutation perm;
  OperatorChain chain;

  std::size_t k() const noexcept { return perm.k(); }
  std::size_t stride() const noexcept { return perm.stride(); }
  std::size_t dim() const noexcept { return perm.size(); }
};

ShortRepresentation make_short_representation(std::vector<Vector> u_tilde, Tridiagonal t_block,
                                              std::size_t stride, OperatorChain chain);

// y_blocks in block-Krylov order: slot jk+i multiplies chain^j u_tilde_i.
Vector horner_apply(const ShortRepresentation& rep, std::span<const double> y_blocks);
Vector power_apply(const ShortRepresentation& rep, std::span<const double> z);

Vector apply_u(const ShortRepresentation& rep, std::span<const double> y);
Vector apply_uh(const ShortRepresentation& rep, std::span<const double> z);

}  // namespace srpcr
