#include "srpcr/short_rep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srpcr/errors.hpp"

namespace srpcr {

Permutation::Permutation(std::size_t k, std::size_t stride) : k_(k), stride_(stride) {
  require(k >= 1 && stride >= 1, ErrorKind::invalid_argument, "permutation needs k, J >= 1");
}

Vector Permutation::permute_forward(std::span<const double> y) const {
  check_same_size(y.size(), size(), "permute_forward");
  Vector out(size());
  for (std::size_t p = 0; p < size(); ++p) out[forward_index(p)] = y[p];
  return out;
}

Vector Permutation::permute_back(std::span<const double> y) const {
  check_same_size(y.size(), size(), "permute_back");
  Vector out(size());
  for (std::size_t p = 0; p < size(); ++p) out[p] = y[forward_index(p)];
  return out;
}

std::span<const double> RFactor::column(std::size_t col) const {
  return {values_.data() + offsets_[col], offsets_[col + 1] - offsets_[col]};
}

double RFactor::at(std::size_t row, std::size_t col) const {
  if (row < first_row_[col] || row > col) return 0.0;
  return values_[offsets_[col] + (row - first_row_[col])];
}

std::size_t RFactor::structural_nonzeros(std::size_t col) const {
  return offsets_[col + 1] - offsets_[col];
}

Vector RFactor::solve(std::span<const double> y) const {
  check_same_size(y.size(), size(), "R solve");
  Vector c(y.begin(), y.end());
  for (std::size_t p = size(); p-- > 0;) {
    auto col = column(p);
    c[p] /= col.back();
    for (std::size_t q = 0; q + 1 < col.size(); ++q) c[first_row_[p] + q] -= col[q] * c[p];
  }
  return c;
}

Vector RFactor::solve_transpose(std::span<const double> y) const {
  check_same_size(y.size(), size(), "R^T solve");
  Vector c(y.begin(), y.end());
  for (std::size_t p = 0; p < size(); ++p) {
    auto col = column(p);
    double s = c[p];
    for (std::size_t q = 0; q + 1 < col.size(); ++q) s -= col[q] * c[first_row_[p] + q];
    c[p] = s / col.back();
  }
  return c;
}

RFactor build_r_factor(const Tridiagonal& t_block, std::size_t k, std::size_t stride) {
  require(k >= 1 && stride >= 1, ErrorKind::invalid_argument, "R factor needs k, J >= 1");
  const std::size_t m = k * stride;
  require(t_block.size() >= m, ErrorKind::invalid_argument, "T block smaller than kJ");
  const auto& al = t_block.alpha;
  const auto& be = t_block.beta;  // be[q] couples q and q+1; only q + 1 < m is used
  RFactor r;
  r.first_row_.resize(m);
  r.offsets_.assign(m + 1, 0);
  std::vector<Vector> cols(m);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t start = i * stride;
    // Band of T^j e_start on rows [lo, hi].
    std::size_t lo = start, hi = start;
    Vector band{1.0};
    for (std::size_t j = 0; j < stride; ++j) {
      const std::size_t p = start + j;
      r.first_row_[p] = lo;
      // The column must end exactly at the diagonal row p == hi.
      cols[p] = band;
      if (j + 1 == stride) break;
      const std::size_t nlo = lo > 0 ? lo - 1 : 0;
      const std::size_t nhi = std::min(hi + 1, m - 1);
      Vector next(nhi - nlo + 1, 0.0);
      for (std::size_t row = lo; row <= hi; ++row) {
        const double x = band[row - lo];
        next[row - nlo] += al[row] * x;
        if (row > 0) next[row - 1 - nlo] += be[row - 1] * x;
        if (row + 1 < m) next[row + 1 - nlo] += be[row] * x;
      }
      lo = nlo;
      hi = nhi;
      band = std::move(next);
    }
  }
  for (std::size_t p = 0; p < m; ++p) {
    const double diag = cols[p].back();
    if (diag == 0.0 || !std::isfinite(diag)) {
      fail(ErrorKind::r_singular, "R has a zero pivot in column " + std::to_string(p + 1));
    }
    r.offsets_[p + 1] = r.offsets_[p] + cols[p].size();
    r.values_.insert(r.values_.end(), cols[p].begin(), cols[p].end());
  }
  return r;
}

ShortRepresentation make_short_representation(std::vector<Vector> u_tilde, Tridiagonal t_block,
                                              std::size_t stride, OperatorChain chain) {
  const std::size_t k = u_tilde.size();
  require(k >= 1, ErrorKind::invalid_argument, "short representation needs k >= 1 columns");
  for (const auto& u : u_tilde) check_same_size(u.size(), chain.size(), "stored column");
  require(t_block.size() == k * stride, ErrorKind::invalid_argument, "T block must be kJ x kJ");
  RFactor r = build_r_factor(t_block, k, stride);
  return ShortRepresentation{std::move(u_tilde), std::move(t_block), std::move(r),
                             Permutation(k, stride), std::move(chain)};
}

Vector horner_apply(const ShortRepresentation& rep, std::span<const double> y_blocks) {
  check_same_size(y_blocks.size(), rep.dim(), "horner_apply coefficients");
  const std::size_t k = rep.k();
  const std::size_t n = rep.chain.size();
  auto add_block = [&](std::size_t j, Vector& z) {
    for (std::size_t i = 0; i < k; ++i) axpy_inplace(y_blocks[j * k + i], rep.u_tilde[i], z);
  };
  Vector z(n, 0.0);
  add_block(rep.stride() - 1, z);
  for (std::size_t j = rep.stride() - 1; j-- > 0;) {
    z = chain_forward(rep.chain, z);
    add_block(j, z);
  }
  return z;
}

Vector power_apply(const ShortRepresentation& rep, std::span<const double> z) {
  check_same_size(z.size(), rep.chain.size(), "power_apply");
  const std::size_t k = rep.k();
  Vector out(rep.dim());
  Vector w(z.begin(), z.end());
  for (std::size_t j = 0; j < rep.stride(); ++j) {
    for (std::size_t i = 0; i < k; ++i) out[j * k + i] = dot(rep.u_tilde[i], w);
    if (j + 1 < rep.stride()) w = chain_adjoint(rep.chain, w);
  }
  return out;
}

Vector apply_u(const ShortRepresentation& rep, std::span<const double> y) {
  return horner_apply(rep, rep.perm.permute_forward(rep.r.solve(y)));
}

Vector apply_uh(const ShortRepresentation& rep, std::span<const double> z) {
  return rep.r.solve_transpose(rep.perm.permute_back(power_apply(rep, z)));
}

}  // namespace srpcr
