#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atlas {

enum class ErrorKind {
  // ingest
  MalformedRow,
  NegativeQuantity,
  YearOutOfBounds,
  UnknownDrug,
  UnknownCountry,
  DuplicateCell,
  InvalidRegistry,
  // transform
  MissingFactor,
  InvalidFactor,
  NegativeValue,
  // cognostics
  EmptySeries,
  // embedding
  SpanMismatch,
  TooFewPoints,
  NonFiniteInput,
  DimensionMismatch,
  // trends
  EmptyWindow,
  InvalidParams,
  // export
  DanglingKey,
  SchemaViolation,
  IoFailure,
  // cli
  Config,
};

/// Process exit status classes used by the command-line tool.
enum class ErrorClass { Config = 2, Data = 3, Numeric = 4 };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorClass classify(ErrorKind kind) noexcept;

/// The single exception type thrown by the library. The kind is stable and
/// meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace atlas
