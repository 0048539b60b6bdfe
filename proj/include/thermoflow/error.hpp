#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermoflow {

enum class ErrorCode {
  NonPositiveBeta,
  IntensivesInEntropyTheory,
  MissingParameter,
  DimensionMismatch,
  LabelMismatch,
  InvalidValue,
  NotNormalized,
  TooLarge,
  OutOfDomain,
  WidthMismatch,
  ContextMismatch,
  EpsilonOutOfRange,
  EntropyRepresentation,
  EnergyRepresentation,
  TargetIsEquilibrium,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveBeta: return "NonPositiveBeta";
    case ErrorCode::IntensivesInEntropyTheory: return "IntensivesInEntropyTheory";
    case ErrorCode::MissingParameter: return "MissingParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::EntropyRepresentation: return "EntropyRepresentation";
    case ErrorCode::EnergyRepresentation: return "EnergyRepresentation";
    case ErrorCode::TargetIsEquilibrium: return "TargetIsEquilibrium";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermoflow
