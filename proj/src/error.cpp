#include "energyspace/error.hpp"

namespace energyspace {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveConductance: return "NonPositiveConductance";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::OriginMissing: return "OriginMissing";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NetworkMismatch: return "NetworkMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::OriginInF: return "OriginInF";
    case ErrorCode::InsufficientEnclosure: return "InsufficientEnclosure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace energyspace
