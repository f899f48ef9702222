#include "srpcr/preconditioner.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "srpcr/errors.hpp"

namespace srpcr {

std::string_view to_string(PreconditionerKind kind) noexcept {
  switch (kind) {
    case PreconditionerKind::identity: return "identity";
    case PreconditionerKind::jacobi: return "jacobi";
    case PreconditionerKind::signed_tridiagonal: return "signed-tridiagonal";
    case PreconditionerKind::ic0: return "ic0";
  }
  return "unknown";
}

namespace {

void check_square(const SparseMatrix& a) {
  require(a.rows() == a.cols(), ErrorKind::dimension_mismatch, "preconditioner needs a square matrix");
}

struct IcFactor {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> cols;
  Vector vals;
};

// Zero-fill incomplete Cholesky on the lower pattern; nullopt on a
// nonpositive pivot.
std::optional<IcFactor> try_ic0(const SparseMatrix& a, double shift) {
  const std::size_t n = a.rows();
  IcFactor f;
  f.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row_start = f.cols.size();
    bool has_diag = false;
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      std::size_t j = a.col_indices()[p];
      if (j > i) break;
      f.cols.push_back(j);
      f.vals.push_back(a.values()[p]);
      has_diag = has_diag || j == i;
    }
    if (!has_diag) {
      f.cols.push_back(i);
      f.vals.push_back(0.0);
    }
    const std::size_t row_end = f.cols.size();
    for (std::size_t p = row_start; p < row_end; ++p) {
      const std::size_t k = f.cols[p];
      // s = sum over j < k in pattern(i) and pattern(k) of L_ij L_kj
      double s = 0.0;
      std::size_t q = row_start;
      std::size_t r = f.offsets[k];
      const std::size_t r_end = k == i ? row_end : f.offsets[k + 1];
      while (q < p && r < r_end) {
        const std::size_t cq = f.cols[q];
        const std::size_t cr = f.cols[r];
        if (cr >= k) break;
        if (cq == cr) {
          s += f.vals[q] * f.vals[r];
          ++q;
          ++r;
        } else if (cq < cr) {
          ++q;
        } else {
          ++r;
        }
      }
      if (k < i) {
        f.vals[p] = (f.vals[p] - s) / f.vals[f.offsets[k + 1] - 1];
      } else {
        double pivot = f.vals[p] + shift - s;
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return std::nullopt;
        f.vals[p] = std::sqrt(pivot);
      }
    }
    f.offsets[i + 1] = f.cols.size();
  }
  return f;
}

}  // namespace

Preconditioner Preconditioner::identity(std::size_t n) {
  require(n > 0, ErrorKind::invalid_argument, "identity preconditioner needs n > 0");
  return Preconditioner(PreconditionerKind::identity, n);
}

Preconditioner Preconditioner::jacobi(const SparseMatrix& a) {
  check_square(a);
  Preconditioner m(PreconditionerKind::jacobi, a.rows());
  m.diag_ = a.diagonal();
  for (double d : m.diag_) {
    if (!(d > 0.0)) fail(ErrorKind::not_spd, "jacobi needs a positive diagonal");
  }
  return m;
}

Preconditioner Preconditioner::signed_tridiagonal(const SparseMatrix& a) {
  check_square(a);
  const std::size_t n = a.rows();
  Preconditioner m(PreconditionerKind::signed_tridiagonal, n);
  m.diag_.resize(n);
  m.off_.assign(n > 0 ? n - 1 : 0, 0.0);
  Vector sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    double aii = a.at(i, i);
    if (aii == 0.0) fail(ErrorKind::invalid_argument, "zero diagonal entry at row " + std::to_string(i + 1));
    sign[i] = aii > 0.0 ? 1.0 : -1.0;
    m.diag_[i] = std::abs(aii);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double upper = sign[i] * a.at(i, i + 1);
    double lower = sign[i + 1] * a.at(i + 1, i);
    if (upper != lower) {
      fail(ErrorKind::not_spd, "sign-scaled band is not symmetric at rows " + std::to_string(i + 1) +
                                   "," + std::to_string(i + 2));
    }
    m.off_[i] = upper;
  }
  m.ldl_d_.resize(n);
  m.ldl_l_.assign(m.off_.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = m.diag_[i];
    if (i > 0) d -= m.ldl_l_[i - 1] * m.ldl_l_[i - 1] * m.ldl_d_[i - 1];
    if (!(d > 0.0)) fail(ErrorKind::not_spd, "signed tridiagonal band is not positive definite");
    m.ldl_d_[i] = d;
    if (i + 1 < n) m.ldl_l_[i] = m.off_[i] / d;
  }
  return m;
}

Preconditioner Preconditioner::ic0(const SparseMatrix& a, double shift) {
  check_square(a);
  require(shift >= 0.0, ErrorKind::invalid_argument, "ic0 shift must be >= 0");
  double mean_diag = 0.0;
  for (double d : a.diagonal()) mean_diag += std::abs(d);
  mean_diag /= static_cast<double>(a.rows());

  double current = shift;
  auto factor = try_ic0(a, current);
  for (int retry = 0; !factor && retry < 8; ++retry) {
    current = retry == 0 ? std::max(shift, 1e-3 * mean_diag) : 2.0 * current;
    factor = try_ic0(a, current);
  }
  if (!factor) fail(ErrorKind::ic_breakdown, "IC(0) pivot breakdown persists after 8 shifted retries");
  Preconditioner m(PreconditionerKind::ic0, a.rows());
  m.shift_used_ = current;
  m.l_offsets_ = std::move(factor->offsets);
  m.l_cols_ = std::move(factor->cols);
  m.l_vals_ = std::move(factor->vals);
  return m;
}

void Preconditioner::apply_inv(std::span<const double> x, std::span<double> y) const {
  check_same_size(x.size(), n_, "preconditioner apply");
  check_same_size(y.size(), n_, "preconditioner apply");
  switch (kind_) {
    case PreconditionerKind::identity:
      std::copy(x.begin(), x.end(), y.begin());
      return;
    case PreconditionerKind::jacobi:
      for (std::size_t i = 0; i < n_; ++i) y[i] = x[i] / diag_[i];
      return;
    case PreconditionerKind::signed_tridiagonal: {
      // L D L^T y = x with unit lower bidiagonal L.
      for (std::size_t i = 0; i < n_; ++i) y[i] = x[i] - (i > 0 ? ldl_l_[i - 1] * y[i - 1] : 0.0);
      for (std::size_t i = 0; i < n_; ++i) y[i] /= ldl_d_[i];
      for (std::size_t i = n_ - 1; i-- > 0;) y[i] -= ldl_l_[i] * y[i + 1];
      return;
    }
    case PreconditionerKind::ic0: {
      for (std::size_t i = 0; i < n_; ++i) {
        double s = x[i];
        const std::size_t last = l_offsets_[i + 1] - 1;
        for (std::size_t p = l_offsets_[i]; p < last; ++p) s -= l_vals_[p] * y[l_cols_[p]];
        y[i] = s / l_vals_[last];
      }
      for (std::size_t i = n_; i-- > 0;) {
        const std::size_t last = l_offsets_[i + 1] - 1;
        y[i] /= l_vals_[last];
        for (std::size_t p = l_offsets_[i]; p < last; ++p) y[l_cols_[p]] -= l_vals_[p] * y[i];
      }
      return;
    }
  }
}

void Preconditioner::apply_fwd(std::span<const double> x, std::span<double> y) const {
  check_same_size(x.size(), n_, "preconditioner apply");
  check_same_size(y.size(), n_, "preconditioner apply");
  switch (kind_) {
    case PreconditionerKind::identity:
      std::copy(x.begin(), x.end(), y.begin());
      return;
    case PreconditionerKind::jacobi:
      for (std::size_t i = 0; i < n_; ++i) y[i] = diag_[i] * x[i];
      return;
    case PreconditionerKind::signed_tridiagonal:
      for (std::size_t i = 0; i < n_; ++i) {
        double s = diag_[i] * x[i];
        if (i > 0) s += off_[i - 1] * x[i - 1];
        if (i + 1 < n_) s += off_[i] * x[i + 1];
        y[i] = s;
      }
      return;
    case PreconditionerKind::ic0: {
      // y = L (L^T x)
      Vector t(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t p = l_offsets_[i]; p < l_offsets_[i + 1]; ++p) t[l_cols_[p]] += l_vals_[p] * x[i];
      }
      for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t p = l_offsets_[i]; p < l_offsets_[i + 1]; ++p) s += l_vals_[p] * t[l_cols_[p]];
        y[i] = s;
      }
      return;
    }
  }
}

Vector Preconditioner::apply_inv(std::span<const double> x) const {
  Vector y(n_);
  apply_inv(x, y);
  return y;
}

Vector Preconditioner::apply_fwd(std::span<const double> x) const {
  Vector y(n_);
  apply_fwd(x, y);
  return y;
}

Preconditioner make_identity(std::size_t n) { return Preconditioner::identity(n); }
Preconditioner make_jacobi(const SparseMatrix& a) { return Preconditioner::jacobi(a); }
Preconditioner make_signed_tridiag(const SparseMatrix& a) { return Preconditioner::signed_tridiagonal(a); }
Preconditioner make_ic0(const SparseMatrix& a, double shift) { return Preconditioner::ic0(a, shift); }

}  // namespace srpcr
