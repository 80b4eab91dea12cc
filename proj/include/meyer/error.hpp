#pragma once

#include <stdexcept>
#include <string>

namespace meyer {

enum class ErrorCode {
  DegenerateBasis,
  NonIntegerDiscreteCoordinates,
  EnumerationBudgetExceeded,
  InvalidArgument,
  ExclusionTooClose,
  WindowTooLarge,
  InsufficientPeakCoverage,
  NegativePart,
  InvalidThreshold,
  UnsupportedDimension,
  ParseError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::NonIntegerDiscreteCoordinates: return "NonIntegerDiscreteCoordinates";
    case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ExclusionTooClose: return "ExclusionTooClose";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::InsufficientPeakCoverage: return "InsufficientPeakCoverage";
    case ErrorCode::NegativePart: return "NegativePart";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Library-wide exception carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace meyer
