#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bellmom {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  PowerOutOfRange,
  NotNormalized,
  InvalidArgument,
  EmptySample,
  NotEnoughChoices,
  ShapeMismatch,
  NegativeSecondMoment,
  RateOutOfRange,
  PhiOutOfRange,
  SchemeMismatch,
  NegativeVariance,
  NotMaximallyEntangledContext,
  UnknownInequality,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

// Numerical failures map to CLI exit code 3; everything else is a usage or
// input problem.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bellmom
