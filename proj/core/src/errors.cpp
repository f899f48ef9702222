#include "srpcr/errors.hpp"

namespace srpcr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::numerical_breakdown: return "numerical-breakdown";
    case ErrorKind::not_spd: return "not-spd";
    case ErrorKind::ic_breakdown: return "ic-breakdown";
    case ErrorKind::r_singular: return "r-singular";
    case ErrorKind::breakdown: return "breakdown";
    case ErrorKind::orthogonality_collapse: return "orthogonality-collapse";
    case ErrorKind::sequence_degenerate: return "sequence-degenerate";
    case ErrorKind::inner_solve_failed: return "inner-solve-failed";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::memory_guard: return "memory-guard";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace srpcr
