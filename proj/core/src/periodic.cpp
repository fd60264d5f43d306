#include "plkit/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plkit {

const char* to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::Repelling: return "REPELLING";
    case OrbitKind::Attracting: return "ATTRACTING";
    case OrbitKind::Superattracting: return "SUPERATTRACTING";
    case OrbitKind::Indifferent: return "INDIFFERENT";
  }
  return "?";
}

OrbitKind classify_multiplier(CPoint lambda, double mult_tol) {
  const double m = std::abs(lambda);
  if (m < mult_tol) return OrbitKind::Superattracting;
  if (m > 1.0 + mult_tol) return OrbitKind::Repelling;
  if (m < 1.0 - mult_tol) return OrbitKind::Attracting;
  return OrbitKind::Indifferent;
}

CPoint chain_multiplier(const MapSpec& g, CPoint z, int period) {
  CPoint lambda = 1.0;
  for (int k = 0; k < period; ++k) {
    lambda *= g.deriv(z);
    z = g.eval(z);
  }
  return lambda;
}

PeriodicOrbit make_orbit(const MapSpec& g, CPoint z, int period, double mult_tol) {
  PeriodicOrbit o;
  o.period = period;
  o.points.reserve(period);
  CPoint w = z;
  for (int k = 0; k < period; ++k) {
    o.points.push_back(w);
    w = g.eval(w);
  }
  o.multiplier = chain_multiplier(g, z, period);
  o.kind = classify_multiplier(o.multiplier, mult_tol);
  return o;
}

namespace {

// g^p(z) - z and its derivative; false when the orbit blows up or hits a pole.
bool return_map(const MapSpec& g, CPoint z, int p, CPoint& f, CPoint& df) {
  try {
    CPoint w = z, d = 1.0;
    for (int k = 0; k < p; ++k) {
      d *= g.deriv(w);
      w = g.eval(w);
      if (!is_finite(w) || std::abs(w) > 1e150) return false;
    }
    f = w - z;
    df = d - 1.0;
    return is_finite(f) && is_finite(df);
  } catch (const Error&) {
    return false;
  }
}

CPoint newton_polish(const MapSpec& g, CPoint z, int p, int iters, double max_step) {
  for (int it = 0; it < iters; ++it) {
    CPoint f, df;
    if (!return_map(g, z, p, f, df) || std::abs(df) == 0.0) break;
    CPoint step = f / df;
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);
    z -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

CPoint nearest(const std::vector<CPoint>& pts, CPoint target) {
  CPoint best = pts.front();
  for (const auto& p : pts)
    if (std::abs(p - target) < std::abs(best - target)) best = p;
  return best;
}

int minimal_period(const MapSpec& g, CPoint z, int p, double tol) {
  for (int q = 1; q < p; ++q) {
    if (p % q) continue;
    CPoint f, df;
    if (return_map(g, z, q, f, df) && std::abs(f) < tol) return q;
  }
  return p;
}

}  // namespace

PeriodicScan find_periodic(const ProperMapDomain& pm, int period, const Region& region, const PeriodicOptions& opt) {
  if (period < 1) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  const MapSpec& g = pm.map;
  const double scale = region.diameter();
  const double ftol = pm.tol.cycle_tol * std::max(1.0, scale);
  const double dedup = pm.tol.dedup_tol_rel * scale;
  PeriodicScan scan;
  scan.period = period;
  scan.bound = 1;
  for (int k = 0; k < period; ++k) scan.bound *= static_cast<std::size_t>(pm.degree);

  std::vector<CPoint> seeds;

  // Fixed-code inverse iteration from the leaves of a backward tree; converges
  // to the repelling points of the given code.
  const int d = g.algebraic_degree();
  double leaves = std::pow(static_cast<double>(d), period);
  if (leaves <= 4096.0) {
    const Box bb = region.bbox();
    const CPoint w0 = bb.center() + 0.37 * 0.5 * bb.width() * std::polar(1.0, 0.9);
    std::vector<std::vector<CPoint>> chains{{w0}};
    for (int level = 0; level < period; ++level) {
      std::vector<std::vector<CPoint>> next;
      for (const auto& ch : chains)
        for (const auto& y : g.preimages(ch.back())) {
          auto c = ch;
          c.push_back(y);
          next.push_back(std::move(c));
        }
      chains = std::move(next);
    }
    std::vector<CPoint> found(chains.size());
    std::vector<char> ok(chains.size(), 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (long s = 0; s < static_cast<long>(chains.size()); ++s) {
      auto chain = chains[s];
      try {
        for (int it = 0; it < opt.inverse_iterations; ++it) {
          std::vector<CPoint> c{chain.back()};
          for (int level = 1; level <= period; ++level) c.push_back(nearest(g.preimages(c.back()), chain[level]));
          const double move = std::abs(c.back() - chain.back());
          chain = std::move(c);
          if (move < 1e-14 * std::max(1.0, scale)) break;
        }
        found[s] = chain.back();
        ok[s] = 1;
      } catch (const Error&) {
      }
    }
    for (std::size_t s = 0; s < chains.size(); ++s)
      if (ok[s]) seeds.push_back(found[s]);
  } else {
    scan.budget_exhausted = true;
  }

  // Newton seed grid over the region's bounding box.
  {
    const Box bb = region.bbox();
    const int n = opt.grid;
    std::vector<CPoint> grid;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const CPoint z(bb.lo.real() + (i + 0.5) * bb.width() / n, bb.lo.imag() + (j + 0.5) * bb.height() / n);
        if (region.contains(z)) grid.push_back(z);
      }
    std::vector<CPoint> out(grid.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long s = 0; s < static_cast<long>(grid.size()); ++s)
      out[s] = newton_polish(g, grid[s], period, opt.newton_iterations, 0.25 * scale);
    seeds.insert(seeds.end(), out.begin(), out.end());
  }
  for (const auto& c : pm.cycles)
    if (period % static_cast<int>(c.points.size()) == 0) seeds.insert(seeds.end(), c.points.begin(), c.points.end());

  std::vector<CPoint> roots;
  for (CPoint z : seeds) {
    z = newton_polish(g, z, period, 8, 0.01 * scale);
    CPoint f, df;
    if (!is_finite(z) || !region.contains(z) || !return_map(g, z, period, f, df) || std::abs(f) >= ftol) continue;
    roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  for (const auto& z : roots) {
    bool dup = false;
    for (auto it = scan.dividing_points.rbegin(); it != scan.dividing_points.rend(); ++it) {
      if (z.real() - it->real() > dedup) break;
      if (std::abs(z - *it) < dedup) {
        dup = true;
        break;
      }
    }
    if (!dup) scan.dividing_points.push_back(z);
  }

  std::vector<char> used(scan.dividing_points.size(), 0);
  for (std::size_t k = 0; k < scan.dividing_points.size(); ++k) {
    const CPoint z = scan.dividing_points[k];
    const int q = minimal_period(g, z, period, ftol);
    scan.minimal_periods.push_back(q);
    if (q != period || used[k]) continue;
    PeriodicOrbit o = make_orbit(g, z, period, pm.tol.mult_tol);
    for (const auto& w : o.points)
      for (std::size_t m = k; m < scan.dividing_points.size(); ++m)
        if (std::abs(scan.dividing_points[m] - w) < 100.0 * dedup + ftol) used[m] = 1;
    scan.orbits.push_back(std::move(o));
  }
  return scan;
}

MainstepReport verify_mainstep(const ProperMapDomain& pm, const InvariantSetReport& K, int p_max,
                               const PeriodicOptions& opt) {
  if (!K.contains_critical)
    throw HypothesesNotMetError("critical points are not in K; no claim is made", "contains_critical");
  if (!K.backward_ok) throw HypothesesNotMetError("K is not backward invariant; no claim is made", "backward_ok");
  if (p_max < 1) throw Error(ErrorCode::InvalidArgument, "p_max must be positive");
  const GridSet band = dilate(K.K, 2.0);
  MainstepReport r;
  r.p_max = p_max;
  for (int p = 1; p <= p_max; ++p) {
    const PeriodicScan scan = find_periodic(pm, p, pm.range, opt);
    r.dividing_counts.push_back(scan.dividing_points.size());
    std::size_t rep = 0;
    for (const auto& o : scan.orbits) {
      if (o.kind != OrbitKind::Repelling) continue;
      ++rep;
      bool outside = false;
      for (const auto& z : o.points) {
        ++r.repelling_checked;
        outside = outside || !band.contains(z);
      }
      if (outside) r.witnesses.push_back(o);
    }
    r.repelling_counts.push_back(rep);
  }
  r.pass = r.witnesses.empty();
  return r;
}

std::vector<CPoint> backward_orbit_to_repeller(const ProperMapDomain& pm, const PeriodicOrbit& a, CPoint z,
                                               int steps) {
  if (a.points.empty() || a.kind != OrbitKind::Repelling)
    throw Error(ErrorCode::InvalidArgument, "backward orbit needs a repelling orbit");
  const int p = static_cast<int>(a.points.size());
  auto dist_to_orbit = [&](CPoint w, int& slot) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i)
      if (std::abs(w - a.points[i]) < best) {
        best = std::abs(w - a.points[i]);
        slot = i;
      }
    return best;
  };
  int slot = 0;
  const double d0 = dist_to_orbit(z, slot);
  std::vector<CPoint> traj{z};
  CPoint w = z;
  for (int k = 0; k < steps; ++k) {
    const int prev = (slot + p - 1) % p;
    const CPoint ap = a.points[prev];
    // Linearized inverse branch fixing the orbit.
    const CPoint seed = ap + (w - a.points[slot]) / pm.map.deriv(ap);
    std::vector<CPoint> pre;
    try {
      pre = pm.map.preimages(w);
    } catch (const Error& e) {
      throw Error(ErrorCode::BranchLost, std::string("preimage solve failed: ") + e.what());
    }
    if (pre.empty()) throw Error(ErrorCode::BranchLost, "no preimage");
    std::sort(pre.begin(), pre.end(),
              [&](CPoint x, CPoint y) { return std::abs(x - seed) < std::abs(y - seed); });
    if (pre.size() > 1 && std::abs(pre[0] - seed) > 0.9 * std::abs(pre[1] - seed) &&
        std::abs(pre[0] - pre[1]) > 1e-12) {
      throw Error(ErrorCode::BranchLost, "inverse branch is ambiguous at step " + std::to_string(k));
    }
    w = pre[0];
    slot = prev;
    traj.push_back(w);
  }
  // Contraction per step is about |lambda|^(-1/p); half of it is required.
  const double bound = std::pow(std::abs(a.multiplier), -static_cast<double>(steps) / (2.0 * p)) * d0;
  int s = 0;
  if (steps > 0 && !(dist_to_orbit(w, s) < bound))
    throw Error(ErrorCode::BranchLost, "backward orbit did not approach the repelling orbit");
  return traj;
}

}  // namespace plkit
