#include "plkit/maps.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "plkit/pullback.hpp"

namespace plkit {

MapSpec::MapSpec(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) throw Error(ErrorCode::InvalidArgument, "denominator is identically zero");
  if (num_.is_zero()) throw Error(ErrorCode::InvalidArgument, "numerator is identically zero");
  if (den_.degree() == 0) {
    num_ = num_ * (1.0 / den_[0]);
    den_ = Polynomial::constant(1.0);
    if (num_.degree() < 2) throw Error(ErrorCode::InvalidArgument, "polynomial map must have degree >= 2");
  }
  if (algebraic_degree() < 2) throw Error(ErrorCode::InvalidArgument, "map degree must be >= 2");
}

MapSpec MapSpec::polynomial(std::vector<CPoint> coeffs) {
  return MapSpec(Polynomial(std::move(coeffs)), Polynomial::constant(1.0));
}

CPoint MapSpec::eval(CPoint z) const {
  if (is_polynomial()) return num_(z);
  const CPoint d = den_(z);
  if (std::abs(d) <= eval_eps) throw Error(ErrorCode::PoleHit, "denominator vanishes");
  return num_(z) / d;
}

CPoint MapSpec::deriv(CPoint z) const {
  CPoint v, d1, d2;
  eval2(z, v, d1, d2);
  return d1;
}

void MapSpec::eval2(CPoint z, CPoint& v, CPoint& d1, CPoint& d2) const {
  CPoint n0, n1, n2;
  num_.eval2(z, n0, n1, n2);
  if (is_polynomial()) {
    v = n0;
    d1 = n1;
    d2 = n2;
    return;
  }
  CPoint q0, q1, q2;
  den_.eval2(z, q0, q1, q2);
  if (std::abs(q0) <= eval_eps) throw Error(ErrorCode::PoleHit, "denominator vanishes");
  v = n0 / q0;
  d1 = (n1 - v * q1) / q0;
  d2 = (n2 - 2.0 * d1 * q1 - v * q2) / q0;
}

Polynomial MapSpec::preimage_equation(CPoint w) const { return num_ - den_ * w; }

Polynomial MapSpec::critical_equation() const {
  if (is_polynomial()) return num_.derivative();
  return num_.derivative() * den_ - num_ * den_.derivative();
}

std::vector<CPoint> MapSpec::preimages(CPoint w) const { return polynomial_roots(preimage_equation(w)); }

std::string MapSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  auto dump = [&](const Polynomial& p) {
    os << '[';
    for (int k = 0; k <= p.degree(); ++k) os << (k ? ", " : "") << '(' << p[k].real() << ',' << p[k].imag() << ')';
    os << ']';
  };
  os << "N=";
  dump(num_);
  os << " D=";
  dump(den_);
  return os.str();
}

CPoint eval(const MapSpec& g, CPoint z) { return g.eval(z); }
CPoint deriv(const MapSpec& g, CPoint z) { return g.deriv(z); }

std::vector<CPoint> critical_points(const MapSpec& g, double root_tol_rel) {
  const Polynomial p = g.critical_equation();
  std::vector<CPoint> out;
  for (const auto& r : polynomial_roots(p)) {
    if (!g.is_polynomial() && std::abs(g.denominator()(r)) <= g.eval_eps) continue;
    double mag = 0.0;
    for (int k = 0; k <= p.degree(); ++k) mag += std::abs(p[k]) * std::pow(std::abs(r), k);
    if (std::abs(p(r)) > root_tol_rel * std::max(mag, 1.0)) {
      throw Error(ErrorCode::RootSolveFailure, "critical point residual exceeds root_tol");
    }
    out.push_back(r);
  }
  return out;
}

const char* to_string(DomainMode m) { return m == DomainMode::Single ? "single" : "multi"; }

const char* to_string(OrbitOutcome o) {
  switch (o) {
    case OrbitOutcome::Escaped: return "escaped";
    case OrbitOutcome::ConvergedToCycle: return "converged_to_cycle";
    case OrbitOutcome::HorizonReached: return "horizon_reached";
  }
  return "?";
}

bool ProperMapDomain::in_domain(CPoint z) const {
  if (!is_finite(z) || !range.contains(z)) return false;
  try {
    return range.contains(map.eval(z));
  } catch (const Error&) {
    return false;
  }
}

std::vector<CPoint> ProperMapDomain::preimages_in_domain(CPoint w) const {
  std::vector<CPoint> out;
  for (const auto& z : map.preimages(w))
    if (range.contains(z)) out.push_back(z);
  return out;
}

CPoint cycle_multiplier(const MapSpec& g, const std::vector<CPoint>& cycle) {
  CPoint m = 1.0;
  for (const auto& z : cycle) m *= g.deriv(z);
  return m;
}

namespace {

// Smallest p with |z_n - z_{n-p}| < tol, or 0.
int detect_period(const std::vector<CPoint>& pts, int max_period, double tol) {
  const int n = static_cast<int>(pts.size()) - 1;
  for (int p = 1; p <= std::min(max_period, n); ++p)
    if (std::abs(pts[n] - pts[n - p]) < tol) return p;
  return 0;
}

bool same_cycle(const DetectedCycle& a, const std::vector<CPoint>& pts, double tol) {
  for (const auto& p : pts)
    for (const auto& q : a.points)
      if (std::abs(p - q) < tol) return true;
  return false;
}

}  // namespace

ProperMapDomain build_proper_map(const MapSpec& g, const Region& range, const BuildOptions& opt) {
  ProperMapDomain pm;
  pm.map = g;
  pm.map.eval_eps = opt.tol.eval_eps;
  pm.range = range;
  pm.mode = opt.mode;
  pm.tol = opt.tol;
  const double scale = pm.scale();

  if (!g.is_polynomial()) {
    for (const auto& p : polynomial_roots(g.denominator()))
      if (range.contains(p) || range.distance_to_boundary(p) < 1e-9 * scale) {
        throw Error(ErrorCode::InvalidArgument, "map has a pole inside the range");
      }
  }

  const PullbackResult pre = pullback_curves(pm.map, range.boundary(512), default_pullback_options(pm));
  for (const auto& c : pre.components)
    for (const auto& v : c.vertices())
      if (!range.contains(v)) throw Error(ErrorCode::NotProper, "preimage of the range is not contained in the range");
  pm.preimage_components = pre.components;
  pm.local_degrees = pre.local_degrees;
  pm.degree = pre.degree_sum();
  if (pm.mode == DomainMode::Single && pm.preimage_components.size() != 1) {
    throw Error(ErrorCode::NotProper, "single-component mode requires a connected preimage, found " +
                                          std::to_string(pm.preimage_components.size()) + " components");
  }

  std::vector<CPoint> all_crit = critical_points(pm.map, opt.tol.root_tol_rel);
  std::vector<CPoint> crit_values;
  for (const auto& c : all_crit) {
    try {
      crit_values.push_back(pm.map.eval(c));
    } catch (const Error&) {
    }
  }

  // Degree check on random regular values.
  std::mt19937_64 rng(opt.seed);
  const Box bb = range.bbox();
  std::uniform_real_distribution<double> ux(bb.lo.real(), bb.hi.real()), uy(bb.lo.imag(), bb.hi.imag());
  int samples = 0, attempts = 0;
  while (samples < opt.degree_samples && attempts < 100 * opt.degree_samples) {
    ++attempts;
    const CPoint w(ux(rng), uy(rng));
    if (!range.contains(w) || range.distance_to_boundary(w) < 1e-3 * scale) continue;
    bool regular = true;
    for (const auto& v : crit_values)
      if (std::abs(v - w) < 1e-3 * scale) regular = false;
    if (!regular) continue;
    const int count = static_cast<int>(pm.preimages_in_domain(w).size());
    if (count != pm.degree) {
      throw Error(ErrorCode::NotProper, "preimage count " + std::to_string(count) + " differs from degree " +
                                            std::to_string(pm.degree));
    }
    ++samples;
  }

  for (const auto& c : all_crit)
    if (pm.in_domain(c)) pm.critical_points.push_back(c);

  // Critical orbits and the postcritical cloud.
  std::vector<CPoint> cloud;
  std::vector<long> succ;  // index of g(cloud[i]) in cloud, -1 if not recorded
  const double cyc_tol = opt.tol.cycle_tol;
  for (const auto& c : pm.critical_points) {
    std::vector<CPoint> orbit{c};
    bool closed = false;
    for (int n = 1; n <= opt.tol.orbit_horizon; ++n) {
      const CPoint prev = orbit.back();
      if (!pm.in_domain(prev)) {
        pm.assumption_violated = true;
        if (pm.violation_witness.empty()) pm.violation_witness = orbit;
        break;
      }
      orbit.push_back(pm.map.eval(prev));
      if (n > 1) succ.back() = static_cast<long>(cloud.size());
      cloud.push_back(orbit.back());
      succ.push_back(-1);
      const int p = detect_period(orbit, opt.tol.max_cycle_period, cyc_tol);
      if (p > 0) {
        succ.back() = static_cast<long>(cloud.size()) - p;
        std::vector<CPoint> pts(orbit.end() - p, orbit.end());
        bool known = false;
        for (const auto& cy : pm.cycles) known = known || same_cycle(cy, pts, 1e-8 * scale);
        if (!known) pm.cycles.push_back({pts, cycle_multiplier(pm.map, pts)});
        closed = true;
        break;
      }
    }
    if (!closed && !pm.assumption_violated) pm.horizon_reached = true;
    pm.critical_orbits.push_back(std::move(orbit));
  }

  const Box sq = bb.squared();
  pm.postcritical = GridSet::square(sq.center(), 0.5 * sq.width() * 1.02, opt.tol.pc_resolution);
  {
    // Inflation radii (cells) pushed along the orbits so the padded cloud maps
    // into itself where g contracts; capped where it expands.
    const double cell = pm.postcritical.cell_size();
    const double pad = opt.tol.pc_pad_cells, cap = 4.0 * opt.tol.pc_pad_cells;
    std::vector<double> r(cloud.size(), pad);
    auto spread = [&](CPoint z, double rad) {
      const CPoint w = pm.map.eval(z);
      double m = 0.0;
      for (int k = 0; k < 16; ++k) m = std::max(m, std::abs(pm.map.eval(z + std::polar(rad * cell, 0.3927 * k)) - w));
      return m / cell;
    };
    for (int round = 0; round < 64; ++round) {
      bool grew = false;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (succ[i] < 0) continue;
        const double want = std::min(cap, spread(cloud[i], r[i] + 1.0));
        if (want > r[succ[i]] + 1e-9) r[succ[i]] = want, grew = true;
      }
      if (!grew) break;
    }
    GridSet padded = pm.postcritical.empty_like();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto c = padded.cell_of(cloud[i]);
      if (!c) continue;
      const int k = static_cast<int>(std::floor(r[i]));
      for (int dj = -k; dj <= k; ++dj)
        for (int di = -k; di <= k; ++di) {
          const int ii = c->first + di, jj = c->second + dj;
          if (ii < 0 || jj < 0 || ii >= padded.nx() || jj >= padded.ny()) continue;
          if (di * di + dj * dj <= r[i] * r[i]) padded.set(ii, jj);
        }
    }
    pm.postcritical = std::move(padded);
  }

  if (!cloud.empty()) {
    bool single = true;
    for (const auto& z : cloud) single = single && std::abs(z - cloud.front()) < 1e-9 * scale;
    if (single) {
      bool fixed = true;
      for (const auto& z : pm.map.preimages(cloud.front())) fixed = fixed && std::abs(z - cloud.front()) < 1e-6 * scale;
      pm.singleton_degenerate = fixed;
    }
  }

  if (opt.strict) {
    if (pm.assumption_violated) {
      throw AssumptionViolatedError("critical orbit leaves the domain", pm.violation_witness);
    }
    if (pm.singleton_degenerate) {
      throw Error(ErrorCode::SingletonDegenerate, "postcritical set is a totally invariant point");
    }
  }
  return pm;
}

OrbitRecord forward_orbit(const ProperMapDomain& pm, CPoint z, int horizon) {
  OrbitRecord rec;
  rec.start = z;
  rec.points.push_back(z);
  if (!pm.in_range(z)) {
    rec.outcome = OrbitOutcome::Escaped;
    rec.escaped_at = 0;
    return rec;
  }
  for (int n = 1; n <= horizon; ++n) {
    CPoint next;
    try {
      next = pm.map.eval(rec.points.back());
    } catch (const Error&) {
      rec.outcome = OrbitOutcome::Escaped;
      rec.escaped_at = n - 1;
      return rec;
    }
    rec.points.push_back(next);
    if (!pm.in_range(next)) {
      rec.outcome = OrbitOutcome::Escaped;
      rec.escaped_at = n;
      return rec;
    }
    const int p = detect_period(rec.points, pm.tol.max_cycle_period, pm.tol.cycle_tol);
    if (p > 0) {
      rec.outcome = OrbitOutcome::ConvergedToCycle;
      rec.period = p;
      rec.multiplier = cycle_multiplier(pm.map, {rec.points.end() - p, rec.points.end()});
      return rec;
    }
  }
  rec.outcome = OrbitOutcome::HorizonReached;
  return rec;
}

CPoint verify_basin_critical(const ProperMapDomain& pm, const std::vector<CPoint>& cycle, bool parabolic) {
  if (cycle.empty()) throw Error(ErrorCode::InvalidArgument, "empty cycle");
  const CPoint lambda = cycle_multiplier(pm.map, cycle);
  if (!parabolic && std::abs(lambda) >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "cycle is not attracting");
  }
  const double tol = parabolic ? 1e-3 * pm.scale() : pm.tol.cycle_tol;
  auto dist = [&](CPoint z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : cycle) d = std::min(d, std::abs(z - c));
    return d;
  };
  for (const auto& c : pm.critical_points) {
    CPoint z = c;
    for (int n = 0; n <= pm.tol.orbit_horizon; ++n) {
      if (dist(z) < tol) return c;
      if (!pm.in_domain(z)) break;
      z = pm.map.eval(z);
    }
  }
  throw Error(ErrorCode::LemmaViolation, "no critical point is attracted to the cycle");
}

}  // namespace plkit
