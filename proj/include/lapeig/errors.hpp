#pragma once

#include <stdexcept>
#include <string>

namespace lapeig {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedDensity,
  OutOfChart,
  NoAnalyticSpectrum,
  GridTooSmall,
  EmptyCloud,
  DimensionMismatch,
  SolverFailure,
  KTooLarge,
  ZeroVector,
  DegenerateBasis,
  SpanTooLarge,
  GapViolation,
  FExceedsOne,
  UndefinedAtPoint,
  CoverageGap,
  UnsupportedDimension,
  QuadratureNotConverged,
  LevelTooDeep,
  InsufficientGrid,
  IoFailure,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI and the Python layer can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lapeig
