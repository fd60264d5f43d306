#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/polynomial.hpp"

namespace plkit {

// Rational map N/D. A constant denominator is folded into N, so polynomial
// maps always carry D = 1.
class MapSpec {
 public:
  MapSpec() = default;
  MapSpec(Polynomial numerator, Polynomial denominator);
  static MapSpec polynomial(std::vector<CPoint> coeffs);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_polynomial() const { return den_.degree() == 0; }
  int algebraic_degree() const { return std::max(num_.degree(), den_.degree()); }

  // Throw PoleHit when |D(z)| <= eval_eps.
  CPoint eval(CPoint z) const;
  CPoint deriv(CPoint z) const;
  void eval2(CPoint z, CPoint& v, CPoint& d1, CPoint& d2) const;

  // N - w D, whose roots are the preimages of w.
  Polynomial preimage_equation(CPoint w) const;
  // N'D - ND', whose roots are the finite critical points.
  Polynomial critical_equation() const;
  std::vector<CPoint> preimages(CPoint w) const;

  std::string to_string() const;

  double eval_eps = 1e-14;

 private:
  Polynomial num_ = Polynomial::monomial(2);
  Polynomial den_ = Polynomial::constant(1.0);
};

CPoint eval(const MapSpec& g, CPoint z);
CPoint deriv(const MapSpec& g, CPoint z);
// Roots of the derivative numerator with multiplicity, residual-validated.
std::vector<CPoint> critical_points(const MapSpec& g, double root_tol_rel = 1e-8);

enum class DomainMode { Single, Multi };
const char* to_string(DomainMode m);

struct DetectedCycle {
  std::vector<CPoint> points;
  CPoint multiplier;
};

// g: U' -> U with U' = g^{-1}(U). Immutable after build_proper_map.
class ProperMapDomain {
 public:
  MapSpec map;
  Region range = Region::disk(0.0, 1.0);
  DomainMode mode = DomainMode::Single;
  Tolerances tol;

  std::vector<JordanCurve> preimage_components;
  std::vector<int> local_degrees;
  int degree = 0;
  std::vector<CPoint> critical_points;
  std::vector<std::vector<CPoint>> critical_orbits;
  GridSet postcritical;
  std::vector<DetectedCycle> cycles;

  // Standing-assumption flags; recorded instead of thrown.
  bool assumption_violated = false;
  std::vector<CPoint> violation_witness;
  bool singleton_degenerate = false;
  bool horizon_reached = false;

  double scale() const { return range.diameter(); }
  double pb_tol() const { return tol.pb_tol_rel * scale(); }
  bool in_range(CPoint z) const { return range.contains(z); }
  // Membership in U' (range point whose image lies in the range).
  bool in_domain(CPoint z) const;
  // Preimages of w inside U'.
  std::vector<CPoint> preimages_in_domain(CPoint w) const;
};

struct BuildOptions {
  DomainMode mode = DomainMode::Single;
  Tolerances tol;
  int degree_samples = 24;
  std::uint64_t seed = 1;
  // Throw the standing-assumption errors instead of flagging them.
  bool strict = false;
};

ProperMapDomain build_proper_map(const MapSpec& g, const Region& range, const BuildOptions& opt = {});

enum class OrbitOutcome { Escaped, ConvergedToCycle, HorizonReached };
const char* to_string(OrbitOutcome o);

struct OrbitRecord {
  CPoint start;
  std::vector<CPoint> points;
  OrbitOutcome outcome = OrbitOutcome::HorizonReached;
  int escaped_at = -1;
  int period = 0;
  CPoint multiplier = 0.0;
};

// ESCAPED_AT(n): n is the first index with points[n] outside U.
OrbitRecord forward_orbit(const ProperMapDomain& pm, CPoint z, int horizon);

// Critical point whose orbit converges to the given cycle.
CPoint verify_basin_critical(const ProperMapDomain& pm, const std::vector<CPoint>& cycle,
                             bool parabolic = false);

CPoint cycle_multiplier(const MapSpec& g, const std::vector<CPoint>& cycle);

}  // namespace plkit
