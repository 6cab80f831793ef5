#pragma once

#include <stdexcept>
#include <string>

namespace permexp {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  invalid_permutation,
  degenerate,
  no_bracket,
  singular_a_hat,
  singular_gamma,
  boundary,
  max_iters_exceeded,
  not_centered,
  too_many_failures,
  io_error,
};

// Thrown by operations whose contract names an explicit failure mode.
// The CLI maps these to exit code 3 (numerical failure).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace permexp
