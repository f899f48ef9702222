#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srpcr {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  numerical_breakdown,
  not_spd,
  ic_breakdown,
  r_singular,
  breakdown,
  orthogonality_collapse,
  sequence_degenerate,
  inner_solve_failed,
  parse_error,
  io_error,
  memory_guard,
};

// Stable names, used on the CLI diagnostic stream.
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) fail(kind, message);
}

}  // namespace srpcr
