#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdr {

enum class ErrorCode {
  // parameters and configuration
  NonPositiveRate,
  NegativeAmplitude,
  NonFinite,
  UnknownKey,
  BadValue,
  BadConfig,
  InvalidGrid,
  UnknownFigure,
  WriteFailure,
  // steady state
  DegenerateDenominator,
  NonRealCoefficients,
  NoRealRoot,
  // response
  SingularSystem,
  PoleHit,
  ZeroPump,
  UnstableBranch,
  // time-domain oracle
  InvalidStep,
  BoundViolation,
  NotSettled,
  ZeroDelta,
  IncommensurateWindow,
  // feature extraction
  TooFewPoints,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for errors caused by the numerics rather than by the request.
bool is_numerical(ErrorCode code) noexcept;

}  // namespace qdr
