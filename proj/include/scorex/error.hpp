#pragma once

#include <stdexcept>
#include <string>

namespace scorex {

enum class ErrorCode {
  // tensor + table I/O
  BadMagic,
  UnsupportedDtype,
  HeaderMalformed,
  ShapeMismatch,
  NonFinite,
  IoError,
  ParseError,
  DuplicateId,
  // scorers
  WindowTooShort,
  TrajectoryTooShort,
  // knn
  EmptyReference,
  EmptySubset,
  DimensionMismatch,
  // graph / gnn
  TooFewNodes,
  LabelOutOfRange,
  EmptyMask,
  SubsetTooSmall,
  DegenerateValidation,
  // metrics
  DegenerateInput,
  LengthMismatch,
  // pipeline
  FractionOutOfRange,
  CoverageGap,
  EmptyResult,
  EmptyKeptSet,
  // synth + config
  ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

/// Validation/data error carrying a typed code. Everything a caller can
/// trigger with bad inputs or bad files throws this; anything else escaping
/// the library is a genuine bug.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace scorex
