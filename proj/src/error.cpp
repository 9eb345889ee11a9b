#include "scorex/error.hpp"

namespace scorex {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::HeaderMalformed: return "HeaderMalformed";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::SubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::DegenerateValidation: return "DegenerateValidation";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::EmptyKeptSet: return "EmptyKeptSet";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "UnknownError";
}

}  // namespace scorex
