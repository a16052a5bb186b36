#include "qdr/error.hpp"

namespace qdr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NegativeAmplitude: return "NegativeAmplitude";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::WriteFailure: return "WriteFailure";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonRealCoefficients: return "NonRealCoefficients";
    case ErrorCode::NoRealRoot: return "NoRealRoot";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::ZeroPump: return "ZeroPump";
    case ErrorCode::UnstableBranch: return "UnstableBranch";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::NotSettled: return "NotSettled";
    case ErrorCode::ZeroDelta: return "ZeroDelta";
    case ErrorCode::IncommensurateWindow: return "IncommensurateWindow";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateDenominator:
    case ErrorCode::NonRealCoefficients:
    case ErrorCode::NoRealRoot:
    case ErrorCode::SingularSystem:
    case ErrorCode::PoleHit:
    case ErrorCode::UnstableBranch:
    case ErrorCode::BoundViolation:
    case ErrorCode::NotSettled:
      return true;
    default:
      return false;
  }
}

}  // namespace qdr
