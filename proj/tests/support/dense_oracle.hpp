// Dense reference computations for tests. Everything here goes through Eigen,
// independent of the library's own kernels.
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "srpcr/linalg.hpp"
#include "srpcr/operators.hpp"
#include "srpcr/preconditioner.hpp"
#include "srpcr/solvers.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline VectorXd to_eigen(const srpcr::Vector& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline srpcr::Vector from_eigen(const VectorXd& v) { return srpcr::Vector(v.data(), v.data() + v.size()); }

inline MatrixXd dense(const srpcr::SparseMatrix& a) {
  MatrixXd d = MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.col_indices()[p])) += a.values()[p];
    }
  }
  return d;
}

// Materialize a linear map column by column.
template <typename F>
MatrixXd materialize(std::size_t n, F&& apply) {
  MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    srpcr::Vector e(n, 0.0);
    e[j] = 1.0;
    out.col(static_cast<Eigen::Index>(j)) = to_eigen(apply(e));
  }
  return out;
}

inline MatrixXd dense_minv(const srpcr::Preconditioner& m) {
  return materialize(m.size(), [&](const srpcr::Vector& e) { return m.apply_inv(e); });
}

inline MatrixXd dense_m(const srpcr::Preconditioner& m) {
  return materialize(m.size(), [&](const srpcr::Vector& e) { return m.apply_fwd(e); });
}

inline MatrixXd columns(const std::vector<srpcr::Vector>& cols) {
  MatrixXd out(static_cast<Eigen::Index>(cols.empty() ? 0 : cols[0].size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = to_eigen(cols[j]);
  return out;
}

inline MatrixXd tridiagonal(const srpcr::Tridiagonal& t, std::size_t rows, std::size_t cols) {
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t j = 0; j < cols; ++j) {
    const auto J = static_cast<Eigen::Index>(j);
    if (j < rows) out(J, J) = t.alpha[j];
    if (j + 1 < rows) out(J + 1, J) = t.beta[j];
    if (j >= 1 && j - 1 < rows) out(J - 1, J) = t.beta[j - 1];
  }
  return out;
}

// min over c of ||M^{-1}(r - A W c)||_M, i.e. min ||L^{-1}(r - A W c)||_2 for M = L L^T.
struct MinResidual {
  double norm;
  VectorXd coefficients;
};

inline MinResidual min_residual(const MatrixXd& a, const MatrixXd& minv, const VectorXd& r, const MatrixXd& w) {
  Eigen::LLT<MatrixXd> llt(minv);  // minv = S S^T
  MatrixXd st = llt.matrixU();
  MatrixXd g = st * (a * w);
  VectorXd rhs = st * r;
  VectorXd c = g.colPivHouseholderQr().solve(rhs);
  return {(rhs - g * c).norm(), c};
}

inline double m_norm_residual(const MatrixXd& minv, const VectorXd& r) {
  return std::sqrt(std::max(0.0, r.dot(minv * r)));
}

inline srpcr::Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  srpcr::Vector v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

// Random sparse SPD matrix: symmetric pattern, diagonally dominant.
inline srpcr::SparseMatrix random_spd(std::size_t n, std::uint64_t seed, double density = 0.15) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<srpcr::Triplet> t;
  std::vector<double> rowsum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!keep(gen) && j + 1 != i) continue;
      const double v = u(gen);
      t.push_back({i, j, v});
      t.push_back({j, i, v});
      rowsum[i] += std::abs(v);
      rowsum[j] += std::abs(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, rowsum[i] + 0.5 + 0.5 * (u(gen) + 1.0)});
  return srpcr::SparseMatrix::from_triplets(n, n, std::move(t), true);
}

inline std::shared_ptr<const srpcr::SparseMatrix> share(srpcr::SparseMatrix a) {
  return std::make_shared<const srpcr::SparseMatrix>(std::move(a));
}
inline std::shared_ptr<const srpcr::Preconditioner> share(srpcr::Preconditioner m) {
  return std::make_shared<const srpcr::Preconditioner>(std::move(m));
}

// Full U, V bases of a harvesting PCR solve, retained by test scaffolding.
struct FullBasis {
  std::vector<srpcr::Vector> u;
  std::vector<srpcr::Vector> v;
  std::vector<double> theta;
};

inline srpcr::IterationObserver capture(FullBasis& out) {
  return [&out](const srpcr::IterationView& it) {
    out.u.emplace_back(it.u.begin(), it.u.end());
    out.v.emplace_back(it.v.begin(), it.v.end());
    out.theta.push_back(it.theta);
  };
}

}  // namespace oracle
