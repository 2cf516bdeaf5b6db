#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shipcast {

/// Machine-readable failure categories shared by every module.
enum class ErrorKind {
  // grid-core
  BundleMalformed,
  PayloadSizeMismatch,
  TimeAxisInvalid,
  EmptyDomain,
  EmptyMask,
  // categorical
  ValueOutOfRange,
  UnknownWeatherCode,
  UnknownAttribute,
  ScaleInvalid,
  // bulletin grammar
  ValidationFailed,
  UnknownArea,
  ClauseSyntaxError,
  ForecastStructureError,
  // generator
  MissingAttribute,
  DuplicateArea,
  EmptySynopsis,
  // corpus
  AspectRatioInvalid,
  DuplicateEntry,
  // evaluation
  EmptyEvaluation,
  AlignmentError,
  // gateway
  BackendUnavailable,
  MalformedResponse,
  UnknownBackend,
  InvalidRequest,
  // configuration and io
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shipcast
