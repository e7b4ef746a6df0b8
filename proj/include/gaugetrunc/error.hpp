#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaugetrunc {

enum class ErrorCode {
  BoundaryLeak,
  NotConverged,
  CalibrationFailed,
  InvalidSpec,
  DimensionMismatch,
  NotHermitian,
  ClosedFormNeedsTwoLevels,
  UnsupportedKind,
  SolverFailure,
  NotNormalized,
  MissingContext,
  SpaceMismatch,
  CutoffCeiling,
  DegenerateGapAmbiguity,
  StepFailure,
  NonUniqueSteadyState,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; callers switch on
// code() rather than on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace gaugetrunc
