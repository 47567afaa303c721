#include "omchain/error.hpp"

namespace omchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotStructurallySymmetric: return "NotStructurallySymmetric";
    case ErrorCode::OMCycleViolated: return "OMCycleViolated";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::EmptySourceVertex: return "EmptySourceVertex";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::NotRegularNetwork: return "NotRegularNetwork";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::NotClusteringProcess: return "NotClusteringProcess";
    case ErrorCode::InvalidInitialPattern: return "InvalidInitialPattern";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InternalModelError: return "InternalModelError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace omchain
