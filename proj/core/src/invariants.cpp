#include "plkit/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "plkit/pullback.hpp"

namespace plkit {

const char* to_string(OutsideKind k) {
  switch (k) {
    case OutsideKind::EscapesThroughFundamentalAnnulus: return "ESCAPES_THROUGH_FUNDAMENTAL_ANNULUS";
    case OutsideKind::OmegaOnBoundary: return "OMEGA_ON_BOUNDARY";
    case OutsideKind::InKStar: return "IN_KSTAR";
    case OutsideKind::Undecided: return "UNDECIDED";
  }
  return "?";
}

Region domain_region(const ProperMapDomain& pm) { return Region::interior(pm.preimage_components); }

namespace {

std::vector<std::size_t> sample_cells(const std::vector<std::size_t>& occ, int samples, std::uint64_t seed) {
  if (occ.size() <= static_cast<std::size_t>(samples)) return occ;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) out.push_back(occ[rng() % occ.size()]);
  return out;
}

bool safe_eval(const MapSpec& g, CPoint z, CPoint& w) {
  try {
    w = g.eval(z);
    return is_finite(w);
  } catch (const Error&) {
    return false;
  }
}

double forward_pass_fraction(const ProperMapDomain& pm, const GridSet& target, const GridSet& from,
                             const SampleOptions& s) {
  const auto cells = sample_cells(from.occupied(), s.samples, s.seed);
  if (cells.empty()) return 0.0;
  std::size_t pass = 0;
  for (const auto idx : cells) {
    CPoint w;
    if (safe_eval(pm.map, from.center(idx), w) && target.near(w, s.tolerance_cells)) ++pass;
  }
  return static_cast<double>(pass) / cells.size();
}

}  // namespace

InvariantSetReport invariance_flags(const ProperMapDomain& pm, const GridSet& K, const SampleOptions& s) {
  InvariantSetReport r;
  r.K = K;
  r.cell_size = K.cell_size();
  if (K.empty()) return r;
  r.full = topological_hull(K) == K;
  r.forward_pass = forward_pass_fraction(pm, K, K, s);
  r.forward_ok = r.forward_pass >= s.pass_fraction;

  const auto cells = sample_cells(K.occupied(), s.samples, s.seed + 1);
  std::size_t pass = 0;
  for (const auto idx : cells) {
    bool ok = true;
    try {
      for (const auto& y : pm.preimages_in_domain(K.center(idx))) ok = ok && K.near(y, s.tolerance_cells);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) ++pass;
  }
  r.backward_pass = static_cast<double>(pass) / cells.size();
  r.backward_ok = r.backward_pass >= s.pass_fraction;

  r.contains_critical = true;
  for (const auto& c : critical_points(pm.map, pm.tol.root_tol_rel))
    if (pm.in_range(c) && !K.near(c, s.tolerance_cells)) r.contains_critical = false;
  return r;
}

InvariantSetReport nonescaping_set(const ProperMapDomain& pm, const Region& vprime, int resolution, int horizon,
                                   const SampleOptions& sampling) {
  const Box sq = vprime.bbox().squared();
  return nonescaping_set(pm, vprime, GridSet::square(sq.center(), 0.5 * sq.width(), resolution), horizon, sampling);
}

InvariantSetReport nonescaping_set(const ProperMapDomain& pm, const Region& vprime, const GridSet& shape,
                                   int horizon, const SampleOptions& sampling) {
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "negative horizon");
  GridSet K = shape.empty_like();
  auto& cells = K.raw();
  const long n = static_cast<long>(cells.size());
#pragma omp parallel for schedule(dynamic, 4096)
  for (long idx = 0; idx < n; ++idx) {
    CPoint z = shape.center(static_cast<std::size_t>(idx));
    bool alive = true;
    for (int k = 0; k <= horizon && alive; ++k) {
      if (!vprime.contains(z)) {
        alive = false;
      } else if (k < horizon && !safe_eval(pm.map, z, z)) {
        alive = false;
      }
    }
    cells[idx] = alive ? 1 : 0;
  }
  if (K.count() < 10) throw Error(ErrorCode::ResolutionTooCoarse, "non-escaping set occupies fewer than 10 cells");
  return invariance_flags(pm, K, sampling);
}

GridSet maximal_invariant_subset(const ProperMapDomain& pm, const GridSet& X, int horizon, const MaximalOptions& opt) {
  const GridSet hull = topological_hull(X);
  const double fwd = forward_pass_fraction(pm, hull, hull, opt.sampling);
  if (fwd < opt.sampling.pass_fraction) {
    throw Error(ErrorCode::NotForwardInvariant,
                "image of the hull leaves it on " + std::to_string(100.0 * (1.0 - fwd)) + "% of sampled cells");
  }

  // Grand orbits are tested against the fixed hull with one-cell tolerance;
  // eroding the reference instead lets raster noise near the boundary spread.
  const GridSet inside = dilate(hull, 1.5);
  const std::vector<std::size_t> occ = hull.occupied();
  const long m = static_cast<long>(occ.size());
  constexpr long kOut = -1;
  std::vector<long> slot(hull.cell_count(), kOut);
  for (long q = 0; q < m; ++q) slot[occ[q]] = q;
  // Cell of z as a slot in `occ`; kOut when outside the tolerance band, m when
  // inside the band but not in the hull (the chain stops there).
  auto locate = [&](CPoint z) -> long {
    const auto c = hull.cell_of(z);
    if (!c) return kOut;
    const std::size_t idx = hull.index(c->first, c->second);
    if (!inside.test(idx)) return kOut;
    return slot[idx] == kOut ? m : slot[idx];
  };

  std::vector<long> image(m, m);
  std::vector<std::vector<long>> pre(m);
  std::vector<char> bad(m, 0);
#pragma omp parallel for schedule(dynamic, 256)
  for (long q = 0; q < m; ++q) {
    const CPoint c = hull.center(occ[q]);
    CPoint w;
    image[q] = safe_eval(pm.map, c, w) ? locate(w) : kOut;
    try {
      for (const auto& y : pm.preimages_in_domain(c)) pre[q].push_back(locate(y));
    } catch (const Error&) {
      pre[q].push_back(kOut);
    }
    // Forward orbit of the center.
    CPoint z = c;
    for (int k = 0; k < horizon; ++k) {
      if (!safe_eval(pm.map, z, z) || !inside.contains(z)) {
        bad[q] = 1;
        break;
      }
    }
  }

  // Backward chains into the complement, then forward images reaching them
  // (preimages of forward iterates complete the grand orbit).
  std::vector<char> back(m, 0);
  GridSet S = hull;
  for (int round = 0; round < opt.max_rounds; ++round) {
    for (int depth = 0; depth < opt.sweep_depth; ++depth) {
      std::vector<char> next = back;
      for (long q = 0; q < m; ++q) {
        if (next[q]) continue;
        for (const long y : pre[q])
          if (y == kOut || (y < m && back[y])) next[q] = 1;
      }
      if (next == back) break;
      back = std::move(next);
    }
    std::vector<char> reach = back;
    for (int depth = 0; depth < opt.sweep_depth * (round + 1); ++depth) {
      bool changed = false;
      for (long q = 0; q < m; ++q) {
        const long w = image[q];
        if (!reach[q] && w >= 0 && w < m && reach[w]) {
          reach[q] = 1;
          changed = true;
        }
      }
      if (!changed) break;
    }
    GridSet next = hull;
    for (long q = 0; q < m; ++q)
      if (bad[q] || reach[q] || image[q] == kOut) next.set(occ[q], false);
    if (next.empty()) return next;
    next = topological_hull(next);
    if (next == S) break;
    S = std::move(next);
  }
  return S;
}

GridSet compute_kstar(const ProperMapDomain& pm, const PLCertificate& cert, int k_max) {
  const Box sq = pm.range.bbox().squared();
  return compute_kstar(pm, cert, GridSet::square(sq.center(), 0.5 * sq.width() * 1.02, 1024), k_max);
}

GridSet compute_kstar(const ProperMapDomain& pm, const PLCertificate& cert, const GridSet& shape, int k_max) {
  return compute_kstar_detailed(pm, cert, shape, k_max).kstar;
}

KStarResult compute_kstar_detailed(const ProperMapDomain& pm, const PLCertificate& cert, const GridSet& shape,
                                   int k_max) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be positive");
  const PullbackOptions opt = pullback_options_for_cell(pm, shape.cell_size());
  KStarResult out;
  std::vector<JordanCurve> curves{cert.outer};
  out.kstar = rasterize_interior(curves, shape);
  // Closed-collar intersection kept alongside, used once no center is left inside.
  GridSet closed = rasterize_closed(curves, shape);
  out.outer = closed;
  out.counts.push_back(out.kstar.count());
  for (int k = 1; k <= k_max; ++k) {
    try {
      curves = pullback_curves(pm.map, curves, opt).components;
    } catch (const Error& e) {
      // Level curves pinched below the pullback resolution: keep the last level.
      if (e.code() != ErrorCode::StitchFailure) throw;
      out.note = std::string("stopped at level ") + std::to_string(k) + ": " + e.what();
      break;
    }
    GridSet next_closed = rasterize_closed(curves, shape).intersected(closed);
    GridSet next = out.thin ? next_closed : rasterize_interior(curves, shape).intersected(out.kstar);
    if (next.empty() && !out.thin) {
      out.thin = true;
      out.kstar = closed;
      next = next_closed;
    }
    const double hd = hausdorff_cells(next, out.kstar);
    out.kstar = std::move(next);
    closed = std::move(next_closed);
    out.outer = closed;
    out.levels = k;
    out.counts.push_back(out.kstar.count());
    if (hd < 1.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

OutsideClassification classify_outside_point(const ProperMapDomain& pm, const GridSet& kstar, CPoint x, int horizon) {
  OutsideClassification out;
  if (!pm.in_range(x)) return out;
  std::vector<CPoint> orbit{x};
  CPoint z = x;
  for (int n = 0; n <= horizon; ++n) {
    CPoint w;
    if (!safe_eval(pm.map, z, w) || !pm.in_range(w)) {
      out.kind = OutsideKind::EscapesThroughFundamentalAnnulus;
      out.n = n;
      return out;
    }
    z = w;
    orbit.push_back(z);
  }
  if (kstar.contains(x)) {
    out.kind = OutsideKind::InKStar;
    return out;
  }
  const double tol = pm.tol.boundary_tol_rel * pm.scale();
  const std::size_t tail = orbit.size() - orbit.size() / 4;
  bool near_boundary = orbit.size() >= 4;
  for (std::size_t k = tail; k < orbit.size() && near_boundary; ++k)
    near_boundary = pm.range.distance_to_boundary(orbit[k]) <= tol;
  if (near_boundary) out.kind = OutsideKind::OmegaOnBoundary;
  return out;
}

}  // namespace plkit
