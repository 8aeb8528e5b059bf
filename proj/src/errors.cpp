#include "lapeig/errors.hpp"

namespace lapeig {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedDensity: return "UnsupportedDensity";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::NoAnalyticSpectrum: return "NoAnalyticSpectrum";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::SpanTooLarge: return "SpanTooLarge";
    case ErrorCode::GapViolation: return "GapViolation";
    case ErrorCode::FExceedsOne: return "FExceedsOne";
    case ErrorCode::UndefinedAtPoint: return "UndefinedAtPoint";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::LevelTooDeep: return "LevelTooDeep";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace lapeig
