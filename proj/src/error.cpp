#include "funkmean/error.hpp"

namespace funkmean {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::TimesOutOfRange: return "TimesOutOfRange";
    case ErrorCode::NonMonotoneTimes: return "NonMonotoneTimes";
    case ErrorCode::SplineBasisTooSmall: return "SplineBasisTooSmall";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotTwoGroups: return "NotTwoGroups";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ResampleDegenerate: return "ResampleDegenerate";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
  }
  return "Unknown";
}

}  // namespace funkmean
