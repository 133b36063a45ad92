#include "bellmom/error.hpp"

namespace bellmom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PowerOutOfRange: return "PowerOutOfRange";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NotEnoughChoices: return "NotEnoughChoices";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeSecondMoment: return "NegativeSecondMoment";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::PhiOutOfRange: return "PhiOutOfRange";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::NotMaximallyEntangledContext: return "NotMaximallyEntangledContext";
    case ErrorCode::UnknownInequality: return "UnknownInequality";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::NegativeSecondMoment:
    case ErrorCode::NegativeVariance:
    case ErrorCode::NotNormalized:
      return true;
    default:
      return false;
  }
}

}  // namespace bellmom
