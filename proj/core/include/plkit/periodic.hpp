#pragma once

#include <string>
#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/invariants.hpp"
#include "plkit/maps.hpp"

namespace plkit {

enum class OrbitKind { Repelling, Attracting, Superattracting, Indifferent };
const char* to_string(OrbitKind k);
OrbitKind classify_multiplier(CPoint lambda, double mult_tol);

struct PeriodicOrbit {
  std::vector<CPoint> points;
  int period = 0;
  CPoint multiplier = 0.0;
  OrbitKind kind = OrbitKind::Indifferent;
};

// Multiplier of the return map by chaining g' along the first `period` iterates.
CPoint chain_multiplier(const MapSpec& g, CPoint z, int period);
PeriodicOrbit make_orbit(const MapSpec& g, CPoint z, int period, double mult_tol);

struct PeriodicScan {
  int period = 0;
  // Orbits of exact period `period` meeting the region.
  std::vector<PeriodicOrbit> orbits;
  // Distinct solutions of g^p(z) = z in the region, any minimal period dividing p.
  std::vector<CPoint> dividing_points;
  std::vector<int> minimal_periods;
  std::size_t bound = 0;  // d^p
  bool budget_exhausted = false;
};

struct PeriodicOptions {
  int grid = 64;
  int inverse_iterations = 400;
  int newton_iterations = 100;
};

PeriodicScan find_periodic(const ProperMapDomain& pm, int period, const Region& region,
                           const PeriodicOptions& opt = {});

struct MainstepReport {
  bool pass = false;
  int p_max = 0;
  std::vector<std::size_t> dividing_counts;  // index p-1
  std::vector<std::size_t> repelling_counts;
  std::size_t repelling_checked = 0;
  std::vector<PeriodicOrbit> witnesses;  // repelling orbits with a point outside dilate(K, 2)
};

// Repelling periodic points of period <= p_max must lie in dilate(K, 2 cells).
MainstepReport verify_mainstep(const ProperMapDomain& pm, const InvariantSetReport& K, int p_max,
                               const PeriodicOptions& opt = {});

// Backward orbit of z along the inverse branches fixing the repelling orbit.
std::vector<CPoint> backward_orbit_to_repeller(const ProperMapDomain& pm, const PeriodicOrbit& a, CPoint z,
                                               int steps);

}  // namespace plkit
