#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vscreen {

enum class ErrorCode {
  EmptySample,
  ZeroVariance,
  ShapeError,
  InsufficientSample,
  DivisionByZero,
  MissingData,
  SingularDesign,
  DegenerateFit,
  NotSymmetric,
  UnstableStatistic,
  ParseError,
  SchemaError,
  DuplicateRecord,
  EmptyInput,
  ConfigError,
  EmptyReferenceGroup,
  MissingSection,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type. Statistics that are
// merely undefined (empty conditioning set, zero variance in an index) are
// carried as std::nullopt instead and never thrown.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InsufficientSample: return "InsufficientSample";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::UnstableStatistic: return "UnstableStatistic";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyReferenceGroup: return "EmptyReferenceGroup";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vscreen
