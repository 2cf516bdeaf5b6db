#include "shipcast/error.hpp"

namespace shipcast {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BundleMalformed: return "BundleMalformed";
    case ErrorKind::PayloadSizeMismatch: return "PayloadSizeMismatch";
    case ErrorKind::TimeAxisInvalid: return "TimeAxisInvalid";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::UnknownWeatherCode: return "UnknownWeatherCode";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::ScaleInvalid: return "ScaleInvalid";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::UnknownArea: return "UnknownArea";
    case ErrorKind::ClauseSyntaxError: return "ClauseSyntaxError";
    case ErrorKind::ForecastStructureError: return "ForecastStructureError";
    case ErrorKind::MissingAttribute: return "MissingAttribute";
    case ErrorKind::DuplicateArea: return "DuplicateArea";
    case ErrorKind::EmptySynopsis: return "EmptySynopsis";
    case ErrorKind::AspectRatioInvalid: return "AspectRatioInvalid";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::UnknownBackend: return "UnknownBackend";
    case ErrorKind::InvalidRequest: return "InvalidRequest";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace shipcast
