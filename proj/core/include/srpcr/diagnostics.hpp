#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/preconditioner.hpp"

namespace srpcr {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline constexpr std::size_t kMaxDiagnosticColumns = 2000;

// Q[i][j] = <M v_i, v_j>, M applied forward.
DenseMatrix compute_q(const Preconditioner& m, std::span<const Vector> v_columns,
                      std::size_t max_columns = kMaxDiagnosticColumns);
// Same Gram matrix from images d_i = M v_i when the caller already has them.
DenseMatrix compute_q_from_images(std::span<const Vector> d_columns, std::span<const Vector> v_columns,
                                  std::size_t max_columns = kMaxDiagnosticColumns);

// Sturm count: number of eigenvalues of T (size m) strictly below x.
std::size_t sturm_count(std::span<const double> alpha, std::span<const double> beta, double x);
// Eigenvalue with 0-based ascending index via bisection.
double tridiagonal_eigenvalue(std::span<const double> alpha, std::span<const double> beta,
                              std::size_t index);
// kappa_2 of the m x m symmetric tridiagonal (beta[i] couples i, i+1); +inf if singular.
double tridiagonal_condition(std::span<const double> alpha, std::span<const double> beta);

// G[i][j] = kappa_2(T_{i:j,i:j}) for j - i < band_limit (symmetric fill);
// entries outside the band are NaN. Rows are split across threads.
DenseMatrix compute_g(const Tridiagonal& t, std::size_t band_limit = 200, unsigned threads = 1);

// Elementwise log10|x|.
DenseMatrix log10_abs(const DenseMatrix& m);

struct ConditionEstimate {
  double kappa = 0.0;
  double lambda_max_abs = 0.0;
  double lambda_min_abs = 0.0;
  bool converged = false;  // false: low-confidence estimate
};

// Power iteration for |lambda|_max, inverse iteration through MINRES solves
// for |lambda|_min.
ConditionEstimate condest_2norm(const SparseMatrix& a, std::size_t iters = 200);

// CSV with 17 significant digits; nan/inf spelled out.
void write_dense_csv(const DenseMatrix& m, std::ostream& out);

}  // namespace srpcr
