#ifndef COREMARKET_ERROR_HPP
#define COREMARKET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coremarket {

enum class ErrorCode {
  CyclicPreference,
  UnknownAgent,
  DuplicateAgent,
  SelfDispreferred,
  SyntaxError,
  InvalidAllocation,
  InvalidMatching,
  InvalidInstance,
  AgentSetMismatch,
  NotAnImprovement,
  NotInCore,
  NotStable,
  TiesPresent,
  TooLarge,
  NoSuchArc,
  EmptyCore,
  LoopInDigraph,
  InvalidDigraph,
  KTooLarge,
  BadParams,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicPreference: return "CyclicPreference";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::DuplicateAgent: return "DuplicateAgent";
    case ErrorCode::SelfDispreferred: return "SelfDispreferred";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::InvalidAllocation: return "InvalidAllocation";
    case ErrorCode::InvalidMatching: return "InvalidMatching";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::AgentSetMismatch: return "AgentSetMismatch";
    case ErrorCode::NotAnImprovement: return "NotAnImprovement";
    case ErrorCode::NotInCore: return "NotInCore";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::TiesPresent: return "TiesPresent";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoSuchArc: return "NoSuchArc";
    case ErrorCode::EmptyCore: return "EmptyCore";
    case ErrorCode::LoopInDigraph: return "LoopInDigraph";
    case ErrorCode::InvalidDigraph: return "InvalidDigraph";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::BadParams: return "BadParams";
  }
  return "Unknown";
}

// All recoverable failures (bad input, violated preconditions) are reported
// through this type. Broken internal invariants throw std::logic_error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Error(ErrorCode code, std::size_t line, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + " (line " +
                           std::to_string(line) + "): " + message),
        code_(code),
        line_(line),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // 1-based source line for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }
  // The message without the code and line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
  std::string detail_;
};

}  // namespace coremarket

#endif  // COREMARKET_ERROR_HPP
