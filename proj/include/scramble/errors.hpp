#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scramble {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  SymbolOutOfRange,
  AlphabetMismatch,
  UnresolvedPlan,
  NotMixing,
  NoConnector,
  GapTooSmall,
  DepthExceeded,
  NotSelfConcatenable,
  ThetaOutOfRange,
  EmptyChain,
  EpsilonTooSmall,
  OffChainMeasure,
  EpsilonExceedsZeta,
  ThetaDenominatorTooLarge,
  HorizonCapExceeded,
  MissingDistalPairs,
  DegenerateSupport,
  MinWindowTooLarge,
  IndeterminateSignature,
  SupportOverlap,
  NotFullSupport,
  PrecisionExhausted,
  CannotDecrement,
  NoRepresentative,
};

inline std::string_view error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::UnresolvedPlan: return "UnresolvedPlan";
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::NoConnector: return "NoConnector";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::NotSelfConcatenable: return "NotSelfConcatenable";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::EpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorCode::OffChainMeasure: return "OffChainMeasure";
    case ErrorCode::EpsilonExceedsZeta: return "EpsilonExceedsZeta";
    case ErrorCode::ThetaDenominatorTooLarge: return "ThetaDenominatorTooLarge";
    case ErrorCode::HorizonCapExceeded: return "HorizonCapExceeded";
    case ErrorCode::MissingDistalPairs: return "MissingDistalPairs";
    case ErrorCode::DegenerateSupport: return "DegenerateSupport";
    case ErrorCode::MinWindowTooLarge: return "MinWindowTooLarge";
    case ErrorCode::IndeterminateSignature: return "IndeterminateSignature";
    case ErrorCode::SupportOverlap: return "SupportOverlap";
    case ErrorCode::NotFullSupport: return "NotFullSupport";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::CannotDecrement: return "CannotDecrement";
    case ErrorCode::NoRepresentative: return "NoRepresentative";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace scramble
