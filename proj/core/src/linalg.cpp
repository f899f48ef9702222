#include "srpcr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srpcr/errors.hpp"

namespace srpcr {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::dimension_mismatch,
         std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

bool all_finite(std::span<const double> x) noexcept {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values,
                           bool hermitian)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)),
      hermitian_(hermitian) {
  require(rows_ > 0 && cols_ > 0, ErrorKind::invalid_argument, "empty matrix dimension");
  require(row_offsets_.size() == rows_ + 1, ErrorKind::invalid_argument,
          "row_offsets must have rows+1 entries");
  require(row_offsets_.front() == 0 && row_offsets_.back() == col_indices_.size() &&
              col_indices_.size() == values_.size(),
          ErrorKind::invalid_argument, "inconsistent CSR arrays");
  for (std::size_t i = 0; i < rows_; ++i) {
    require(row_offsets_[i] <= row_offsets_[i + 1], ErrorKind::invalid_argument,
            "row_offsets not monotone");
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      require(col_indices_[p] < cols_, ErrorKind::invalid_argument, "column index out of range");
      require(p == row_offsets_[i] || col_indices_[p - 1] < col_indices_[p],
              ErrorKind::invalid_argument, "column indices not strictly increasing");
    }
  }
  require(all_finite(values_), ErrorKind::invalid_argument, "non-finite matrix value");
  if (hermitian_) {
    require(rows_ == cols_, ErrorKind::invalid_argument, "hermitian matrix must be square");
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
        if (at(col_indices_[p], i) != values_[p]) {
          fail(ErrorKind::invalid_argument, "matrix flagged hermitian is not symmetric");
        }
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries, bool hermitian) {
  for (const auto& t : entries) {
    require(t.row < rows && t.col < cols, ErrorKind::invalid_argument, "triplet out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::size_t> cols_out;
  std::vector<double> vals;
  cols_out.reserve(entries.size());
  vals.reserve(entries.size());
  std::size_t last_row = rows;
  for (const auto& t : entries) {
    if (!cols_out.empty() && last_row == t.row && cols_out.back() == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols_out.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    last_row = t.row;
  }
  for (std::size_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals),
                      hermitian);
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  require(i < rows_ && j < cols_, ErrorKind::invalid_argument, "index out of range");
  auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      s += values_[p] * x[col_indices_[p]];
    }
    y[i] = s;
  }
}

Vector Tridiagonal::multiply(std::span<const double> x) const {
  const std::size_t m = size();
  check_same_size(x.size(), m, "tridiagonal multiply");
  Vector y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = alpha[i] * x[i];
    if (i > 0) s += beta[i - 1] * x[i - 1];
    if (i + 1 < m) s += beta[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

Tridiagonal Tridiagonal::section(std::size_t first, std::size_t length) const {
  require(first + length <= size(), ErrorKind::invalid_argument, "tridiagonal section out of range");
  Tridiagonal t;
  t.alpha.assign(alpha.begin() + static_cast<std::ptrdiff_t>(first),
                 alpha.begin() + static_cast<std::ptrdiff_t>(first + length));
  t.beta.assign(beta.begin() + static_cast<std::ptrdiff_t>(first),
                beta.begin() + static_cast<std::ptrdiff_t>(first + length));
  return t;
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  check_same_size(a.cols(), x.size(), "spmv");
  Vector y(a.rows());
  a.multiply(x, y);
  if (!all_finite(y)) fail(ErrorKind::numerical_breakdown, "spmv produced a non-finite value");
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double m_dot(const LinearMap& m_forward, std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size(), "m_dot");
  Vector mx = m_forward(x);
  return dot(mx, y);
}

Vector axpy(double a, std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size(), "axpy");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

void axpy_inplace(double a, std::span<const double> x, std::span<double> y) {
  check_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale_inplace(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

}  // namespace srpcr
