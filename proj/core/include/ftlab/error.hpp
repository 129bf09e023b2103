#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftlab {

enum class ErrorCode {
  NonExpanding,
  InvalidMap,
  CountMismatch,
  NoConvergence,
  SnapAmbiguity,
  ResourceLimit,
  TailTooHeavy,
  NegativeSpectrum,
  FactorizationFailure,
  IndexMismatch,
  QuadratureNotConverged,
  UnstableSpectrum,
  PartialReport,
  InvalidArgument,
  ConfigMissing,
  ConfigInvalid,
  IoFailure,
};

/// Stable upper-snake identifier, e.g. "COUNT_MISMATCH".
std::string_view to_string(ErrorCode code);

/// True for errors caused by bad input rather than by numerics.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ftlab
