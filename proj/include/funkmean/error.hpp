#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace funkmean {

enum class ErrorCode {
  EmptyGrid,
  TimesOutOfRange,
  NonMonotoneTimes,
  SplineBasisTooSmall,
  RankDeficient,
  DegenerateDomain,
  GridTooCoarse,
  InvalidCurve,
  InvalidDataset,
  TooFewObservations,
  SingularCovariance,
  DimensionMismatch,
  NotTwoGroups,
  InvalidConfig,
  ResampleDegenerate,
  DomainError,
  FactorizationFailed,
  EmptyInput,
  IOFailure,
  ParseError,
  UnknownPreset,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a group covariance cannot be inverted. `group` is zero-based.
class SingularCovarianceError : public Error {
 public:
  SingularCovarianceError(std::size_t group, double condition, const std::string& detail)
      : Error(ErrorCode::SingularCovariance, detail), group_(group), condition_(condition) {}

  std::size_t group() const noexcept { return group_; }
  double condition() const noexcept { return condition_; }

 private:
  std::size_t group_;
  double condition_;
};

}  // namespace funkmean
