#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace energyspace {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveConductance,
  AsymmetricInput,
  SelfLoop,
  Disconnected,
  OriginMissing,
  UnknownVertex,
  InvalidSize,
  ParseError,
  DomainMismatch,
  NetworkMismatch,
  NotHermitian,
  NotPositiveDefinite,
  NotPsd,
  ConvergenceFailure,
  OriginInF,
  InsufficientEnclosure,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace energyspace
