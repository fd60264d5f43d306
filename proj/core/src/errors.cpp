#include "plkit/types.hpp"

namespace plkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::PointOnCurve: return "PointOnCurve";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::RootSolveFailure: return "RootSolveFailure";
    case ErrorCode::NotProper: return "NotProper";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::SingletonDegenerate: return "SingletonDegenerate";
    case ErrorCode::LemmaViolation: return "LemmaViolation";
    case ErrorCode::CriticalValueOnCurve: return "CriticalValueOnCurve";
    case ErrorCode::ContinuationDiverged: return "ContinuationDiverged";
    case ErrorCode::StitchFailure: return "StitchFailure";
    case ErrorCode::CertificationFailed: return "CertificationFailed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotForwardInvariant: return "NotForwardInvariant";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::HypothesesNotMet: return "HypothesesNotMet";
    case ErrorCode::BranchLost: return "BranchLost";
    case ErrorCode::ExtensionFailed: return "ExtensionFailed";
    case ErrorCode::PreimageSolveFailure: return "PreimageSolveFailure";
    case ErrorCode::OrbitEscaped: return "OrbitEscaped";
    case ErrorCode::DerivativeZeroHit: return "DerivativeZeroHit";
    case ErrorCode::NonHyperbolicSample: return "NonHyperbolicSample";
    case ErrorCode::TooFewCells: return "TooFewCells";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace plkit
