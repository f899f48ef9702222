#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace srpcr {

using Vector = std::vector<double>;

// Maps x to y; used for forward preconditioner handles in m_dot.
using LinearMap = std::function<Vector(std::span<const double>)>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row, real. Immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values,
               bool hermitian = false);

  // Duplicates are summed, explicit zeros kept.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries, bool hermitian = false);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_hermitian() const noexcept { return hermitian_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t i, std::size_t j) const;
  Vector diagonal() const;

  // y = A x, no allocation, no finiteness check.
  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
  bool hermitian_;
};

// Symmetric tridiagonal T. beta[i] couples rows i and i+1; beta.back() is
// the trailing coefficient linking T to the next (not yet computed) column.
struct Tridiagonal {
  Vector alpha;
  Vector beta;

  std::size_t size() const noexcept { return alpha.size(); }
  Vector multiply(std::span<const double> x) const;
  Tridiagonal section(std::size_t first, std::size_t length) const;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double m_dot(const LinearMap& m_forward, std::span<const double> x, std::span<const double> y);

Vector axpy(double a, std::span<const double> x, std::span<const double> y);
void axpy_inplace(double a, std::span<const double> x, std::span<double> y);
void scale_inplace(double a, std::span<double> x);

bool all_finite(std::span<const double> x) noexcept;
void check_same_size(std::size_t a, std::size_t b, const char* what);

}  // namespace srpcr
