#include "srpcr/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srpcr/errors.hpp"

namespace srpcr {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::parse_error, "line " + std::to_string(line) + ": " + what);
}

struct Banner {
  std::string format;    // coordinate | array
  std::string field;     // real | integer
  std::string symmetry;  // symmetric | general
};

Banner read_banner(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) parse_fail(1, "missing Matrix Market banner");
  line_no = 1;
  std::istringstream ss(line);
  std::string tag, object;
  Banner b;
  ss >> tag >> object >> b.format >> b.field >> b.symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix") parse_fail(1, "bad banner");
  b.format = lower(b.format);
  b.field = lower(b.field);
  b.symmetry = lower(b.symmetry);
  if (b.format != "coordinate" && b.format != "array") parse_fail(1, "unsupported format " + b.format);
  if (b.field != "real" && b.field != "integer") parse_fail(1, "unsupported field " + b.field);
  if (b.symmetry != "symmetric" && b.symmetry != "general") {
    parse_fail(1, "unsupported symmetry " + b.symmetry);
  }
  return b;
}

// Next line that is neither blank nor a comment.
bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

SparseMatrix parse_matrix_market(std::istream& in) {
  std::size_t line_no = 0;
  Banner banner = read_banner(in, line_no);
  if (banner.format != "coordinate") parse_fail(line_no, "matrix must be in coordinate format");
  std::string line;
  if (!next_data_line(in, line, line_no)) parse_fail(line_no, "missing size line");
  std::size_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries)) parse_fail(line_no, "malformed size line");
  }
  if (rows != cols) parse_fail(line_no, "matrix is not square");
  if (rows == 0) parse_fail(line_no, "zero dimension");
  if (entries == 0) parse_fail(line_no, "empty pattern");

  const bool symmetric = banner.symmetry == "symmetric";
  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  for (std::size_t e = 0; e < entries; ++e) {
    if (!next_data_line(in, line, line_no)) parse_fail(line_no, "unexpected end of file");
    std::istringstream ss(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) parse_fail(line_no, "malformed entry");
    if (i < 1 || j < 1 || i > rows || j > cols) parse_fail(line_no, "index out of range");
    if (symmetric && j > i) parse_fail(line_no, "symmetric file stores an upper-triangle entry");
    triplets.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) triplets.push_back({j - 1, i - 1, v});
  }
  SparseMatrix a = SparseMatrix::from_triplets(rows, cols, std::move(triplets), false);
  // Reject asymmetric general input before flagging hermitian.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      if (a.at(a.col_indices()[p], i) != a.values()[p]) {
        fail(ErrorKind::parse_error, "general matrix is not symmetric");
      }
    }
  }
  auto offsets = std::vector<std::size_t>(a.row_offsets().begin(), a.row_offsets().end());
  auto idx = std::vector<std::size_t>(a.col_indices().begin(), a.col_indices().end());
  auto vals = std::vector<double>(a.values().begin(), a.values().end());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(idx), std::move(vals), true);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
  return parse_matrix_market(in);
}

Vector parse_matrix_market_vector(std::istream& in) {
  std::size_t line_no = 0;
  Banner banner = read_banner(in, line_no);
  std::string line;
  if (!next_data_line(in, line, line_no)) parse_fail(line_no, "missing size line");
  std::istringstream size_ss(line);
  std::size_t rows = 0, cols = 0, entries = 0;
  if (!(size_ss >> rows >> cols)) parse_fail(line_no, "malformed size line");
  if (cols != 1 || rows == 0) parse_fail(line_no, "expected a single column");
  Vector v(rows, 0.0);
  if (banner.format == "array") {
    for (std::size_t i = 0; i < rows; ++i) {
      if (!next_data_line(in, line, line_no)) parse_fail(line_no, "unexpected end of file");
      std::istringstream ss(line);
      if (!(ss >> v[i])) parse_fail(line_no, "malformed value");
    }
    return v;
  }
  if (!(size_ss >> entries)) parse_fail(line_no, "malformed size line");
  for (std::size_t e = 0; e < entries; ++e) {
    if (!next_data_line(in, line, line_no)) parse_fail(line_no, "unexpected end of file");
    std::istringstream ss(line);
    std::size_t i = 0, j = 0;
    double x = 0.0;
    if (!(ss >> i >> j >> x) || i < 1 || i > rows || j != 1) parse_fail(line_no, "malformed entry");
    v[i - 1] += x;
  }
  return v;
}

Vector read_matrix_market_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
  return parse_matrix_market_vector(in);
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  const bool sym = a.is_hermitian();
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      if (!sym || a.col_indices()[p] <= i) ++count;
    }
  }
  out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << "\n";
  out << a.rows() << " " << a.cols() << " " << count << "\n";
  char buf[64];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      std::size_t j = a.col_indices()[p];
      if (sym && j > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", a.values()[p]);
      out << i + 1 << " " << j + 1 << " " << buf << "\n";
    }
  }
  if (!out) fail(ErrorKind::io_error, "write failed");
}

SparseMatrix gen_laplace_1d(std::size_t n, double scale) {
  require(n >= 2, ErrorKind::invalid_argument, "gen_laplace_1d needs N >= 2");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, -scale});
    t.push_back({i, i, 2.0 * scale});
    if (i + 1 < n) t.push_back({i, i + 1, -scale});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t), true);
}

SparseMatrix gen_shifted_laplace(std::size_t n, double sigma) {
  require(n >= 2, ErrorKind::invalid_argument, "grid size must be >= 2");
  const std::size_t big = n * n;
  std::vector<Triplet> t;
  t.reserve(5 * big);
  for (std::size_t gy = 0; gy < n; ++gy) {
    for (std::size_t gx = 0; gx < n; ++gx) {
      std::size_t i = gy * n + gx;
      if (gy > 0) t.push_back({i, i - n, -1.0});
      if (gx > 0) t.push_back({i, i - 1, -1.0});
      t.push_back({i, i, 4.0 - sigma});
      if (gx + 1 < n) t.push_back({i, i + 1, -1.0});
      if (gy + 1 < n) t.push_back({i, i + n, -1.0});
    }
  }
  return SparseMatrix::from_triplets(big, big, std::move(t), true);
}

SparseMatrix gen_laplace_2d(std::size_t n) { return gen_shifted_laplace(n, 0.0); }

Vector ones_image(const SparseMatrix& a) { return spmv(a, Vector(a.cols(), 1.0)); }

}  // namespace srpcr
