#include "geoconvex/error.hpp"

namespace geoconvex {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::EvalDomainError: return "EvalDomainError";
    case ErrorKind::AntipodalPoints: return "AntipodalPoints";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::InvalidTangent: return "InvalidTangent";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::InverseSearchFailed: return "InverseSearchFailed";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace geoconvex
