#include "srpcr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "srpcr/errors.hpp"
#include "srpcr/solvers.hpp"

namespace srpcr {

namespace {

void guard_columns(std::size_t m, std::size_t max_columns) {
  if (m > max_columns) {
    fail(ErrorKind::memory_guard, "diagnostics limited to " + std::to_string(max_columns) + " columns");
  }
}

DenseMatrix gram(std::span<const Vector> left, std::span<const Vector> right) {
  const std::size_t m = right.size();
  DenseMatrix q(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) q(i, j) = dot(left[i], right[j]);
  }
  return q;
}

}  // namespace

DenseMatrix compute_q(const Preconditioner& m, std::span<const Vector> v_columns,
                      std::size_t max_columns) {
  guard_columns(v_columns.size(), max_columns);
  std::vector<Vector> images;
  images.reserve(v_columns.size());
  for (const auto& v : v_columns) images.push_back(m.apply_fwd(v));
  return gram(images, v_columns);
}

DenseMatrix compute_q_from_images(std::span<const Vector> d_columns, std::span<const Vector> v_columns,
                                  std::size_t max_columns) {
  check_same_size(d_columns.size(), v_columns.size(), "compute_q columns");
  guard_columns(v_columns.size(), max_columns);
  return gram(d_columns, v_columns);
}

std::size_t sturm_count(std::span<const double> alpha, std::span<const double> beta, double x) {
  const std::size_t m = alpha.size();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
    q = (alpha[i] - x) - (i > 0 ? b2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

double tridiagonal_eigenvalue(std::span<const double> alpha, std::span<const double> beta,
                              std::size_t index) {
  const std::size_t m = alpha.size();
  require(index < m, ErrorKind::invalid_argument, "eigenvalue index out of range");
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(beta[i - 1]);
    if (i + 1 < m) radius += std::abs(beta[i]);
    lo = i == 0 ? alpha[i] - radius : std::min(lo, alpha[i] - radius);
    hi = i == 0 ? alpha[i] + radius : std::max(hi, alpha[i] + radius);
  }
  const double span_width = std::max(hi - lo, std::abs(hi) + std::abs(lo));
  lo -= 1e-14 * span_width + std::numeric_limits<double>::min();
  hi += 1e-14 * span_width + std::numeric_limits<double>::min();
  // Invariant: count(lo) <= index < count(hi).
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(alpha, beta, mid) <= index) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double tridiagonal_condition(std::span<const double> alpha, std::span<const double> beta) {
  const std::size_t m = alpha.size();
  if (m == 0) return std::numeric_limits<double>::quiet_NaN();
  const double lmin = tridiagonal_eigenvalue(alpha, beta, 0);
  const double lmax = tridiagonal_eigenvalue(alpha, beta, m - 1);
  const double big = std::max(std::abs(lmin), std::abs(lmax));
  const std::size_t negatives = sturm_count(alpha, beta, 0.0);
  double small = std::numeric_limits<double>::infinity();
  if (negatives > 0) small = std::min(small, std::abs(tridiagonal_eigenvalue(alpha, beta, negatives - 1)));
  if (negatives < m) small = std::min(small, std::abs(tridiagonal_eigenvalue(alpha, beta, negatives)));
  // Bisection resolves eigenvalues only to about eps * |lambda|max, so anything
  // below that is indistinguishable from an exact zero.
  const double floor = 2.0 * static_cast<double>(m) * std::numeric_limits<double>::epsilon() * big;
  if (big == 0.0 || small <= floor) return std::numeric_limits<double>::infinity();
  return big / small;
}

DenseMatrix compute_g(const Tridiagonal& t, std::size_t band_limit, unsigned threads) {
  const std::size_t m = t.size();
  require(m >= 1, ErrorKind::invalid_argument, "compute_g needs m >= 1");
  require(band_limit >= 1, ErrorKind::invalid_argument, "band limit must be >= 1");
  guard_columns(m, kMaxDiagnosticColumns);
  DenseMatrix g(m, m, std::numeric_limits<double>::quiet_NaN());
  auto rows = [&](std::size_t first, std::size_t step) {
    for (std::size_t i = first; i < m; i += step) {
      for (std::size_t j = i; j < m && j - i < band_limit; ++j) {
        std::span<const double> al(t.alpha.data() + i, j - i + 1);
        std::span<const double> be(t.beta.data() + i, j - i + 1);
        const double kappa = tridiagonal_condition(al, be);
        g(i, j) = kappa;
        g(j, i) = kappa;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
  if (workers == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(rows, w, workers);
    for (auto& th : pool) th.join();
  }
  return g;
}

DenseMatrix log10_abs(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& x : out.data) x = std::log10(std::abs(x));
  return out;
}

ConditionEstimate condest_2norm(const SparseMatrix& a, std::size_t iters) {
  require(a.rows() == a.cols(), ErrorKind::dimension_mismatch, "condest needs a square matrix");
  require(iters >= 1, ErrorKind::invalid_argument, "condest needs iters >= 1");
  const std::size_t n = a.rows();
  Vector start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = 1.0 + static_cast<double>(i % 7) / 7.0;
  scale_inplace(1.0 / norm2(start), start);

  ConditionEstimate est;
  bool max_ok = false, min_ok = false;

  // Largest |eigenvalue| from Lanczos with full reorthogonalization; plain power
  // iteration stalls on the clustered top of the spectrum.
  {
    std::vector<Vector> basis{start};
    Vector alpha, beta;
    double prev_ritz = 0.0;
    const std::size_t steps = std::min(iters, n);
    for (std::size_t it = 0; it < steps; ++it) {
      Vector w = spmv(a, basis.back());
      alpha.push_back(dot(w, basis.back()));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) axpy_inplace(-dot(q, w), q, w);
      const double b = norm2(w);
      beta.push_back(0.0);
      const std::size_t m = alpha.size();
      const double ritz = std::max(std::abs(tridiagonal_eigenvalue(alpha, beta, 0)),
                                   std::abs(tridiagonal_eigenvalue(alpha, beta, m - 1)));
      est.lambda_max_abs = ritz;
      const double scale = std::max(ritz, 1e-300);
      if (b <= 1e-14 * scale || (it > 0 && std::abs(ritz - prev_ritz) <= 1e-13 * scale)) {
        max_ok = true;
        break;
      }
      prev_ritz = ritz;
      beta.back() = b;
      scale_inplace(1.0 / b, w);
      basis.push_back(std::move(w));
    }
    if (!max_ok) max_ok = std::abs(est.lambda_max_abs - prev_ritz) <= 1e-6 * est.lambda_max_abs;
  }

  Vector x = start;
  double prev = 0.0;
  const Preconditioner identity = Preconditioner::identity(n);
  const Vector zero(n, 0.0);
  x = start;
  prev = 0.0;
  double inv_norm = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    SolveReport rep = pminres_solve(a, identity, x, zero, 1e-12, 20 * n + 100);
    if (rep.termination != Termination::tolerance_met) break;
    inv_norm = norm2(rep.x);
    if (inv_norm == 0.0) break;
    scale_inplace(1.0 / inv_norm, rep.x);
    x = std::move(rep.x);
    if (it > 0 && std::abs(inv_norm - prev) <= 1e-12 * inv_norm) {
      min_ok = true;
      break;
    }
    prev = inv_norm;
  }
  if (!min_ok && inv_norm > 0.0) min_ok = std::abs(inv_norm - prev) <= 1e-6 * inv_norm;
  est.lambda_min_abs = inv_norm > 0.0 ? 1.0 / inv_norm : 0.0;
  est.kappa = est.lambda_min_abs > 0.0 ? est.lambda_max_abs / est.lambda_min_abs
                                       : std::numeric_limits<double>::infinity();
  est.converged = max_ok && min_ok;
  return est;
}

void write_dense_csv(const DenseMatrix& m, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double x = m(i, j);
      if (std::isnan(x)) {
        out << "nan";
      } else if (std::isinf(x)) {
        out << (x > 0 ? "inf" : "-inf");
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
      }
      out << (j + 1 < m.cols ? "," : "\n");
    }
  }
  if (!out) fail(ErrorKind::io_error, "csv write failed");
}

}  // namespace srpcr
