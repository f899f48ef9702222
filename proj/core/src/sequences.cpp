#include "srpcr/sequences.hpp"

#include <cmath>
#include <string>

#include "srpcr/errors.hpp"
#include "srpcr/problem_io.hpp"
#include "srpcr/solvers.hpp"

namespace srpcr {

std::string_view to_string(SequenceKind kind) noexcept {
  switch (kind) {
    case SequenceKind::a: return "A";
    case SequenceKind::b: return "B";
    case SequenceKind::c: return "C";
    case SequenceKind::example31: return "example31";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(std::string_view name) {
  if (name == "A" || name == "a") return SequenceKind::a;
  if (name == "B" || name == "b") return SequenceKind::b;
  if (name == "C" || name == "c") return SequenceKind::c;
  if (name == "example31") return SequenceKind::example31;
  fail(ErrorKind::invalid_argument, "unknown sequence kind '" + std::string(name) + "'");
}

namespace {

Vector solve_inner(const SparseMatrix& a, const Preconditioner& m, std::span<const double> rhs,
                   double tol, std::size_t index) {
  const Vector zero(rhs.size(), 0.0);
  SolveReport rep = pminres_solve(a, m, rhs, zero, tol, 20 * rhs.size() + 100);
  if (rep.termination != Termination::tolerance_met) {
    fail(ErrorKind::inner_solve_failed,
         "inner solve for sequence vector " + std::to_string(index + 1) + " did not converge");
  }
  return rep.x;
}

}  // namespace

RhsSequence gen_sequence(SequenceKind kind, const SparseMatrix& a, const Preconditioner& m,
                         std::span<const double> d, std::size_t q, double inner_tol) {
  const std::size_t n = a.rows();
  check_same_size(d.size(), n, "sequence start vector");
  check_same_size(m.size(), n, "sequence preconditioner");
  require(q >= 1 && q <= n, ErrorKind::invalid_argument, "sequence length must satisfy 1 <= q <= N");
  require(kind != SequenceKind::example31, ErrorKind::invalid_argument,
          "example31 is built by gen_example31");
  require(inner_tol > 0.0, ErrorKind::invalid_argument, "inner_tol must be positive");

  RhsSequence seq{kind, {}, Vector(d.begin(), d.end()), inner_tol};
  Vector next = kind == SequenceKind::b ? m.apply_inv(d) : Vector(d.begin(), d.end());
  for (std::size_t i = 0; i < q; ++i) {
    if (i > 0) {
      const Vector& prev = seq.vectors.back();
      switch (kind) {
        case SequenceKind::a: next = solve_inner(a, m, prev, inner_tol, i); break;
        case SequenceKind::b: next = m.apply_fwd(solve_inner(a, m, prev, inner_tol, i)); break;
        case SequenceKind::c: next = spmv(a, m.apply_inv(prev)); break;
        case SequenceKind::example31: break;
      }
    }
    const double original = norm2(next);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& bj : seq.vectors) axpy_inplace(-dot(bj, next), bj, next);
    }
    const double nrm = norm2(next);
    if (!(nrm >= 1e-12) || !(nrm > 1e-12 * original)) {
      fail(ErrorKind::sequence_degenerate,
           "sequence vector " + std::to_string(i + 1) + " is linearly dependent on its predecessors");
    }
    scale_inplace(1.0 / nrm, next);
    seq.vectors.push_back(next);
  }
  return seq;
}

Example31 gen_example31(std::size_t n) {
  require(n >= 2 && n % 2 == 0, ErrorKind::invalid_argument, "example31 needs an even N >= 2");
  const double h = 1.0 / static_cast<double>(n + 1);
  Example31 ex{gen_laplace_1d(n, h * h), Vector(n, 1.0), Vector(n, 1.0)};
  for (std::size_t i = 0; i < n / 2; ++i) ex.b2[i] = -1.0;
  return ex;
}

}  // namespace srpcr
