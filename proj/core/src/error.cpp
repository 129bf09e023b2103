#include "ftlab/error.hpp"

namespace ftlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonExpanding: return "NON_EXPANDING";
    case ErrorCode::InvalidMap: return "INVALID_MAP";
    case ErrorCode::CountMismatch: return "COUNT_MISMATCH";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::SnapAmbiguity: return "SNAP_AMBIGUITY";
    case ErrorCode::ResourceLimit: return "RESOURCE_LIMIT";
    case ErrorCode::TailTooHeavy: return "TAIL_TOO_HEAVY";
    case ErrorCode::NegativeSpectrum: return "NEGATIVE_SPECTRUM";
    case ErrorCode::FactorizationFailure: return "FACTORIZATION_FAILURE";
    case ErrorCode::IndexMismatch: return "INDEX_MISMATCH";
    case ErrorCode::QuadratureNotConverged: return "QUADRATURE_NOT_CONVERGED";
    case ErrorCode::UnstableSpectrum: return "UNSTABLE_SPECTRUM";
    case ErrorCode::PartialReport: return "PARTIAL_REPORT";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ConfigMissing: return "CONFIG_MISSING";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::IoFailure: return "IO_FAILURE";
  }
  return "UNKNOWN";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonExpanding:
    case ErrorCode::InvalidMap:
    case ErrorCode::ResourceLimit:
    case ErrorCode::TailTooHeavy:
    case ErrorCode::NegativeSpectrum:
    case ErrorCode::IndexMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigMissing:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::IoFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace ftlab
