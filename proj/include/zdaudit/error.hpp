#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zdaudit {

enum class ErrorCode {
  NonPositiveParameter,
  OrderingViolated,
  PolicyViolated,
  InvalidStrategy,
  NonErgodic,
  DegenerateTarget,
  ZeroAttackPayoff,
  ZeroPhi,
  EmptyGrid,
  InvalidArgument,
  ConfigError,
  UnknownSubcommand,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::OrderingViolated: return "OrderingViolated";
    case ErrorCode::PolicyViolated: return "PolicyViolated";
    case ErrorCode::InvalidStrategy: return "InvalidStrategy";
    case ErrorCode::NonErgodic: return "NonErgodic";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::ZeroAttackPayoff: return "ZeroAttackPayoff";
    case ErrorCode::ZeroPhi: return "ZeroPhi";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zdaudit
