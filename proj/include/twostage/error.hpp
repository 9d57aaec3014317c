#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twostage {

enum class ErrorCode {
  NonPositiveCell,
  ShapeError,
  NotNormalized,
  ZeroTruth,
  MissingPriorCounts,
  ZeroGroupCount,
  MissingNStar,
  DomainError,
  RejectionBudgetExceeded,
  Unattainable,
  SimulationNoise,
  ParseError,
};

/// Name of the error as it appears in diagnostics and CLI output.
std::string_view error_name(ErrorCode code) noexcept;

/// The single exception type thrown by the library. The code identifies the
/// failed precondition; what() carries a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twostage
