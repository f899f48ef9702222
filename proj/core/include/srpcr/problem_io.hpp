#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "srpcr/linalg.hpp"

namespace srpcr {

enum class ProblemOrigin { matrix_market_file, generator };

struct ProblemInstance {
  SparseMatrix a;
  std::string label;
  ProblemOrigin origin;
  Vector d;  // starting vector of the RHS sequence
};

// Coordinate format, real or integer, symmetric or general. The result is
// always flagged hermitian; asymmetric general files are rejected.
SparseMatrix read_matrix_market(const std::filesystem::path& path);
SparseMatrix parse_matrix_market(std::istream& in);

// Dense vector in array format (or an N x 1 coordinate file).
Vector read_matrix_market_vector(const std::filesystem::path& path);
Vector parse_matrix_market_vector(std::istream& in);

// Writes the lower triangle with the `symmetric` qualifier when A is hermitian.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);

SparseMatrix gen_laplace_1d(std::size_t n, double scale);
SparseMatrix gen_laplace_2d(std::size_t n);
SparseMatrix gen_shifted_laplace(std::size_t n, double sigma);

// d = A * ones, the default starting vector for generated problems.
Vector ones_image(const SparseMatrix& a);

}  // namespace srpcr
