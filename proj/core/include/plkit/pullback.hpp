#pragma once

#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/maps.hpp"

namespace plkit {

struct PullbackOptions {
  double pb_tol = 1e-8;      // residual bound |g(v) - target| on output vertices
  double max_step = 1e-2;    // largest continuation step in the z-plane
  double chord_tol = 1e-5;   // decimation tolerance for output polylines
  double cv_margin = 1e-7;   // |g'| threshold signalling a critical-value hit
  double bump = 1e-6;        // outward displacement applied near a critical value
  int bump_retries = 3;
  std::size_t vertex_cap = 200000;
  double geom_eps_rel = 1e-9;
  // Points that output polylines must keep on their original side, in
  // addition to the critical values (typically postcritical orbit points).
  std::vector<CPoint> protect;
};

// Defaults scaled by diam(U): pb_tol 1e-8, max_step 2e-3, bump 2 cv_margin.
PullbackOptions default_pullback_options(const ProperMapDomain& pm);
// Same, with max_step set to a raster cell size.
PullbackOptions pullback_options_for_cell(const ProperMapDomain& pm, double cell);

struct PullbackResult {
  int level = 0;
  std::vector<JordanCurve> components;
  std::vector<int> local_degrees;
  // Index of the target curve each component maps onto.
  std::vector<int> parents;
  double residual = 0.0;
  int bumps = 0;

  int degree_sum() const;
};

PullbackResult pullback_curves(const MapSpec& g, const std::vector<JordanCurve>& targets,
                               const PullbackOptions& opt);
PullbackResult pullback_curve(const ProperMapDomain& pm, const JordanCurve& gamma);
PullbackResult pullback_curve(const ProperMapDomain& pm, const JordanCurve& gamma,
                              const PullbackOptions& opt);

// Levels 1..n_max; each level pulls back every component of the previous one.
std::vector<PullbackResult> iterate_pullback(const ProperMapDomain& pm, const JordanCurve& gamma0,
                                             int n_max);
std::vector<PullbackResult> iterate_pullback(const ProperMapDomain& pm,
                                             const std::vector<JordanCurve>& gamma0, int n_max,
                                             const PullbackOptions& opt);

// Winding number 1 of some curve around every occupied cell center.
bool encloses(const std::vector<JordanCurve>& curves, const GridSet& s);

}  // namespace plkit
