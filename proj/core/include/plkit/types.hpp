#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace plkit {

using CPoint = std::complex<double>;

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  PointOnCurve,
  EmptyInput,
  PoleHit,
  RootSolveFailure,
  NotProper,
  AssumptionViolated,
  SingletonDegenerate,
  LemmaViolation,
  CriticalValueOnCurve,
  ContinuationDiverged,
  StitchFailure,
  CertificationFailed,
  NoConvergence,
  NotForwardInvariant,
  ResolutionTooCoarse,
  HypothesesNotMet,
  BranchLost,
  ExtensionFailed,
  PreimageSolveFailure,
  OrbitEscaped,
  DerivativeZeroHit,
  NonHyperbolicSample,
  TooFewCells,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by build_proper_map in strict mode; carries the escaping critical orbit.
class AssumptionViolatedError : public Error {
 public:
  AssumptionViolatedError(const std::string& what, std::vector<CPoint> witness)
      : Error(ErrorCode::AssumptionViolated, what), witness(std::move(witness)) {}
  std::vector<CPoint> witness;
};

class CertificationFailedError : public Error {
 public:
  CertificationFailedError(const std::string& what, double best_margin)
      : Error(ErrorCode::CertificationFailed, what), best_margin(best_margin) {}
  double best_margin;
};

class HypothesesNotMetError : public Error {
 public:
  HypothesesNotMetError(const std::string& what, std::string failed_flag)
      : Error(ErrorCode::HypothesesNotMet, what), failed_flag(std::move(failed_flag)) {}
  std::string failed_flag;
};

// Numerical tolerances shared by all modules. Values marked "rel" are scaled
// by a characteristic diameter at the point of use.
struct Tolerances {
  double geom_eps_rel = 1e-9;
  double eval_eps = 1e-14;
  double root_tol_rel = 1e-8;
  double pb_tol_rel = 1e-8;
  double cv_margin = 1e-7;
  double cycle_tol = 1e-10;
  int max_cycle_period = 64;
  int orbit_horizon = 10000;
  double pc_pad_cells = 2.0;
  int pc_resolution = 1024;
  double mult_tol = 1e-6;
  double dedup_tol_rel = 1e-7;
  double koe_tol_rel = 1e-8;
  double boundary_tol_rel = 1e-3;
};

inline bool is_finite(CPoint z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace plkit
