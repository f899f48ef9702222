#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "srpcr/linalg.hpp"
#include "srpcr/preconditioner.hpp"

namespace srpcr {

enum class SequenceKind { a, b, c, example31 };

std::string_view to_string(SequenceKind kind) noexcept;
SequenceKind parse_sequence_kind(std::string_view name);

struct RhsSequence {
  SequenceKind kind;
  std::vector<Vector> vectors;  // Euclidean orthonormal
  Vector d;
  double inner_tol;
};

// A: d, A^{-1}d, ...; B: M^{-1}d, (M A^{-1}) M^{-1}d, ...; C: d, (A M^{-1}) d, ...
// Each new generator is the operator applied to the last orthonormalized
// vector, then orthonormalized by two passes of modified Gram-Schmidt.
RhsSequence gen_sequence(SequenceKind kind, const SparseMatrix& a, const Preconditioner& m,
                         std::span<const double> d, std::size_t q, double inner_tol = 1e-12);

struct Example31 {
  SparseMatrix a;
  Vector b1;  // ( 1,  1)
  Vector b2;  // (-1,  1)
};

Example31 gen_example31(std::size_t n);

}  // namespace srpcr
