#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csflab {

enum class ErrorCode {
  InvalidCurve,
  DegenerateSpacing,
  OutOfDomain,
  StepRejected,
  OutOfWindow,
  NotProper,
  HypothesisViolated,
  PathBroken,
  DegenerateProfile,
  DegenerateVertexSet,
  SelfCrossingChord,
  BoundaryViolated,
  ZeroCurvature,
  OrientationAmbiguous,
  WindowTooSmall,
  SheetCountMismatch,
  GridMismatch,
  NonPositiveValue,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for every module; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace csflab
