#include "atlas/error.hpp"

namespace atlas {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NegativeQuantity: return "NegativeQuantity";
    case ErrorKind::YearOutOfBounds: return "YearOutOfBounds";
    case ErrorKind::UnknownDrug: return "UnknownDrug";
    case ErrorKind::UnknownCountry: return "UnknownCountry";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::InvalidRegistry: return "InvalidRegistry";
    case ErrorKind::MissingFactor: return "MissingFactor";
    case ErrorKind::InvalidFactor: return "InvalidFactor";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::SpanMismatch: return "SpanMismatch";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DanglingKey: return "DanglingKey";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return ErrorClass::Config;
    case ErrorKind::NonFiniteInput:
    case ErrorKind::TooFewPoints:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::SpanMismatch:
    case ErrorKind::EmptyWindow:
    case ErrorKind::InvalidParams:
      return ErrorClass::Numeric;
    default:
      return ErrorClass::Data;
  }
}

}  // namespace atlas
