#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfm {

enum class ErrorCode {
  kNotPositiveDefinite,
  kRankDeficient,
  kSolveFailure,
  kLineSearchFailure,
  kDegenerateData,
  kDegenerateTruth,
  kZeroEdges,
  kParseError,
  kNonFiniteValue,
  kTooFewRows,
  kIoError,
  kUsage,
  kInvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSolveFailure: return "SolveFailure";
    case ErrorCode::kLineSearchFailure: return "LineSearchFailure";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kDegenerateTruth: return "DegenerateTruth";
    case ErrorCode::kZeroEdges: return "ZeroEdges";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` is the machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gfm
