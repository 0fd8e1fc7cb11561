#pragma once

#include <stdexcept>
#include <string>

namespace qtk {

// Stable machine-readable codes; the CLI maps these to exit codes and
// report fields.
enum class ErrorCode {
  InvalidVertex,
  SizeCapExceeded,
  InvalidSpec,
  ArityMismatch,
  NotSymmetric,
  NoConvergence,
  NonZeroDiagonal,
  RateOutOfRange,
  BasepointMismatch,
  RateMismatch,
  EmptyFactorList,
  SupportOutsidePoints,
  NotMeanZero,
  NegativeSelfInner,
  DegenerateForm,
  ExplorationExceeded,
  DecompositionMismatch,
  NonConstantS,
  InvalidConfig,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonZeroDiagonal: return "NonZeroDiagonal";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::BasepointMismatch: return "BasepointMismatch";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::EmptyFactorList: return "EmptyFactorList";
    case ErrorCode::SupportOutsidePoints: return "SupportOutsidePoints";
    case ErrorCode::NotMeanZero: return "NotMeanZero";
    case ErrorCode::NegativeSelfInner: return "NegativeSelfInner";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::ExplorationExceeded: return "ExplorationExceeded";
    case ErrorCode::DecompositionMismatch: return "DecompositionMismatch";
    case ErrorCode::NonConstantS: return "NonConstantS";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qtk
