#pragma once

#include <stdexcept>
#include <string>

namespace sinrsim {

enum class ErrorCode {
  invalid_parameter,
  empty_topology,
  assumption_violated,
  infeasible_input,
  config_invalid,
  too_few_checkpoints,
  io_failure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::empty_topology: return "empty-topology";
    case ErrorCode::assumption_violated: return "assumption-violated";
    case ErrorCode::infeasible_input: return "infeasible-input";
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::too_few_checkpoints: return "too-few-checkpoints";
    case ErrorCode::io_failure: return "io-failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sinrsim
