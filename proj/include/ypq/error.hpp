#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ypq {

enum class ErrorCode {
  ParamOutOfRange,
  UnsupportedC,
  RootFindingFailed,
  DimensionMismatch,
  DegreeOverflow,
  ZeroDegree,
  MixedValence,
  BadSlots,
  PointOutOfDomain,
  SingularMetric,
  DegreeMismatch,
  StepFailure,
  BadInitialState,
  BadConfig,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::UnsupportedC: return "UnsupportedC";
    case ErrorCode::RootFindingFailed: return "RootFindingFailed";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::MixedValence: return "MixedValence";
    case ErrorCode::BadSlots: return "BadSlots";
    case ErrorCode::PointOutOfDomain: return "PointOutOfDomain";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::BadInitialState: return "BadInitialState";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ypq
