#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/maps.hpp"
#include "plkit/pullback.hpp"

namespace plkit {

enum class Verdict { A, B, C, Unresolved };
const char* to_string(Verdict v);

struct PLCertificate {
  JordanCurve outer = JordanCurve::circle(0.0, 1.0, 8);
  std::vector<JordanCurve> inner_components;
  std::vector<int> local_degrees;
  double margin = 0.0;
  int degree = 0;
  int n_used = 0;
  // Omega_j sweep parameters (0 when the initial curve was used directly).
  int j_used = 0;
  double dilation_cells = 0.0;
  // Step used for the final pullback; pullback_options_for_cell reproduces it.
  double pullback_cell = 0.0;
};

struct IntersectionEvidence {
  int n = 0;
  std::vector<CPoint> points;
};

struct AttractingEvidence {
  CPoint a = 0.0;
  CPoint multiplier = 0.0;
  std::vector<CPoint> trace;
};

struct TrichotomyVerdict {
  Verdict verdict = Verdict::Unresolved;
  int witness_n = 0;
  std::vector<JordanCurve> gamma0;
  // Gamma_1 .. Gamma_n as computed (each level may have several components).
  std::vector<std::vector<JordanCurve>> levels;
  std::vector<IntersectionEvidence> intersections;  // A
  std::optional<PLCertificate> nesting;             // B: g^n on V_{-n} -> V_0
  std::optional<AttractingEvidence> attracting;     // C
  std::string note;
};

// Level n from level n-1; the default pulls back with the map's options.
using CurveProvider =
    std::function<std::vector<JordanCurve>(int n, const std::vector<JordanCurve>& previous)>;

CurveProvider pullback_provider(const ProperMapDomain& pm);
CurveProvider pullback_provider(const ProperMapDomain& pm, const PullbackOptions& opt);

TrichotomyVerdict classify(const ProperMapDomain& pm, const JordanCurve& gamma0, int n_max = 12);
TrichotomyVerdict classify(const ProperMapDomain& pm, const JordanCurve& gamma0, int n_max,
                           const CurveProvider& provider);

struct CertifyOptions {
  int resolution = 1024;
  int j_max = 8;
  std::vector<double> dilations{1.0, 2.0, 4.0, 8.0};
};

// Polynomial-like restriction g: V' -> V with V' compactly inside V.
PLCertificate certify_pl_restriction(const ProperMapDomain& pm, const TrichotomyVerdict& verdict,
                                     const CertifyOptions& opt = {});

std::pair<CPoint, CPoint> locate_attracting_fixed_point(const ProperMapDomain& pm,
                                                        const TrichotomyVerdict& verdict);

struct RepellingHit {
  int n = 0;
  CPoint z = 0.0;
  CPoint multiplier = 0.0;
};

// Repelling fixed points of g^n within distance eps of gamma0, n in [n_lo, n_hi].
std::vector<RepellingHit> scan_repelling_near_curve(const ProperMapDomain& pm, const JordanCurve& gamma0,
                                                    double eps, int n_lo, int n_hi);

// Cells whose centers lie in the closed region or within about half a cell of it.
GridSet rasterize_closed(const std::vector<JordanCurve>& curves, const GridSet& shape);

}  // namespace plkit
