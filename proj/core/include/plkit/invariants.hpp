#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/maps.hpp"
#include "plkit/trichotomy.hpp"

namespace plkit {

struct InvariantSetReport {
  GridSet K;
  bool full = false;
  bool forward_ok = false;
  bool backward_ok = false;
  bool contains_critical = false;
  double cell_size = 0.0;
  // Sampled pass fractions behind forward_ok / backward_ok.
  double forward_pass = 0.0;
  double backward_pass = 0.0;
};

struct SampleOptions {
  int samples = 500;
  double pass_fraction = 0.99;
  int tolerance_cells = 1;
  std::uint64_t seed = 1;
};

// Escape time over cell centers on the square hull of vprime's bounding box.
InvariantSetReport nonescaping_set(const ProperMapDomain& pm, const Region& vprime, int resolution, int horizon,
                                   const SampleOptions& sampling = {});
// Same, on a caller-provided grid shape.
InvariantSetReport nonescaping_set(const ProperMapDomain& pm, const Region& vprime, const GridSet& shape,
                                   int horizon, const SampleOptions& sampling = {});

// The flags of an InvariantSetReport recomputed for an arbitrary grid set.
InvariantSetReport invariance_flags(const ProperMapDomain& pm, const GridSet& K, const SampleOptions& sampling = {});

// Region U' = g^{-1}(U) as stored in the domain.
Region domain_region(const ProperMapDomain& pm);

struct MaximalOptions {
  int sweep_depth = 8;
  int max_rounds = 8;
  SampleOptions sampling;
};

// Cells of hull(X) whose grand orbit stays in hull(X), to one-cell tolerance.
GridSet maximal_invariant_subset(const ProperMapDomain& pm, const GridSet& X, int horizon,
                                 const MaximalOptions& opt = {});

struct KStarOptions {
  int resolution = 1024;
  int k_max = 48;
};

struct KStarResult {
  GridSet kstar;
  // Same intersection over closed collars: an outer approximation.
  GridSet outer;
  int levels = 0;
  bool converged = false;
  // Set when the interiors stopped covering any cell center.
  bool thin = false;
  std::vector<std::size_t> counts;
  // Why the iteration stopped early, if it did.
  std::string note;
};

// Nested intersection of the rasterized pullbacks of cert.outer.
KStarResult compute_kstar_detailed(const ProperMapDomain& pm, const PLCertificate& cert, const GridSet& shape,
                                   int k_max);
GridSet compute_kstar(const ProperMapDomain& pm, const PLCertificate& cert, int k_max = 48);
GridSet compute_kstar(const ProperMapDomain& pm, const PLCertificate& cert, const GridSet& shape, int k_max);

enum class OutsideKind { EscapesThroughFundamentalAnnulus, OmegaOnBoundary, InKStar, Undecided };
const char* to_string(OutsideKind k);

struct OutsideClassification {
  OutsideKind kind = OutsideKind::Undecided;
  int n = -1;  // first n with g^n(x) in U \ U'
};

OutsideClassification classify_outside_point(const ProperMapDomain& pm, const GridSet& kstar, CPoint x,
                                             int horizon);

}  // namespace plkit
