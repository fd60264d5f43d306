#include "plkit/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace plkit {

namespace {

struct CriticalHit {
  CPoint w;
};

struct Sample {
  CPoint z;
  CPoint w;
};

// Traces one preimage strand of the closed polyline `gam` starting at vertex s.
std::vector<Sample> trace_strand(const MapSpec& g, const std::vector<CPoint>& gam, std::size_t s, CPoint z0,
                                 const PullbackOptions& opt) {
  const std::size_t m = gam.size();
  std::vector<Sample> out{{z0, gam[s]}};
  CPoint z = z0;
  const double newton_tol = 1e-2 * opt.pb_tol;
  for (std::size_t k = 0; k < m; ++k) {
    const CPoint a = gam[(s + k) % m], b = gam[(s + k + 1) % m];
    const double wlen = std::abs(b - a);
    double t = 0.0, dt = 1.0;
    while (t < 1.0) {
      dt = std::min(dt, 1.0 - t);
      CPoint v, d1, d2;
      g.eval2(z, v, d1, d2);
      const double ad1 = std::abs(d1);
      if (ad1 < opt.cv_margin) throw CriticalHit{a + t * (b - a)};
      double zmax = opt.max_step;
      if (std::abs(d2) > 0.0) zmax = std::min(zmax, 0.1 * ad1 / std::abs(d2));
      if (wlen > 0.0) dt = std::min(dt, zmax * ad1 / wlen);
      while (true) {
        if (dt < 1e-14) throw Error(ErrorCode::ContinuationDiverged, "step size underflow while tracing a strand");
        const double t1 = (t + dt >= 1.0 - 1e-15) ? 1.0 : t + dt;
        const CPoint w1 = t1 == 1.0 ? b : a + t1 * (b - a);
        const CPoint zp = z + (w1 - v) / d1;
        CPoint z1 = zp;
        bool ok = false;
        try {
          for (int it = 0; it < 12; ++it) {
            CPoint f, fd, fdd;
            g.eval2(z1, f, fd, fdd);
            const double res = std::abs(f - w1);
            if (res < newton_tol) {
              ok = true;
              break;
            }
            if (std::abs(fd) < opt.cv_margin) throw CriticalHit{w1};
            z1 -= (f - w1) / fd;
          }
        } catch (const Error&) {
          ok = false;
        }
        if (ok && is_finite(z1) && std::abs(z1 - zp) <= 0.5 * std::abs(zp - z) + newton_tol) {
          z = z1;
          t = t1;
          out.push_back({z, w1});
          if (out.size() > 8 * opt.vertex_cap) {
            throw Error(ErrorCode::ContinuationDiverged, "vertex budget exhausted");
          }
          dt *= 2.0;
          break;
        }
        dt *= 0.5;
      }
    }
  }
  return out;
}

// Winding number of the closed loop pts[i0..i1] + chord back to pts[i0] around c.
int loop_winding(const std::vector<Sample>& pts, std::size_t i0, std::size_t i1, CPoint c) {
  int wn = 0;
  for (std::size_t k = i0; k <= i1; ++k) {
    const CPoint a = pts[k].z, b = pts[k == i1 ? i0 : k + 1].z;
    const double cross = (b.real() - a.real()) * (c.imag() - a.imag()) - (c.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= c.imag()) {
      if (b.imag() > c.imag() && cross > 0) ++wn;
    } else if (b.imag() <= c.imag() && cross < 0) {
      --wn;
    }
  }
  return wn;
}

// Input is closed (last sample repeats the first). Drops samples while every
// skipped point stays within chord_tol of the replacing chord; chords never
// exceed max_len and never move a protected point across the curve.
// Output is open (no repeated endpoint).
std::vector<Sample> decimate(const std::vector<Sample>& pts, double chord_tol, double max_len,
                             const std::vector<CPoint>& protect) {
  const std::size_t n = pts.size();
  std::vector<Sample> out{pts[0]};
  std::size_t anchor = 0;
  while (anchor + 1 < n) {
    std::size_t best = anchor + 1;
    for (std::size_t j = anchor + 2; j < n; ++j) {
      const CPoint a = pts[anchor].z, b = pts[j].z;
      if (std::abs(b - a) > max_len) break;
      bool fits = true;
      for (std::size_t q = anchor + 1; q < j && fits; ++q) fits = point_segment_distance(pts[q].z, a, b) <= chord_tol;
      for (std::size_t c = 0; c < protect.size() && fits; ++c)
        if (point_segment_distance(protect[c], a, b) <= max_len) fits = loop_winding(pts, anchor, j, protect[c]) == 0;
      if (!fits) break;
      best = j;
    }
    out.push_back(pts[best]);
    anchor = best;
  }
  out.pop_back();
  if (out.size() < 16) {
    std::vector<Sample> uniform;
    const std::size_t step = std::max<std::size_t>(1, (n - 1) / 16);
    for (std::size_t k = 0; k + 1 < n; k += step) uniform.push_back(pts[k]);
    return uniform;
  }
  return out;
}

// Replaces the stretch of polyline inside the disk B(c, rho) that contains the
// point nearest to c by an arc of radius rho sweeping the same angle about c,
// so c stays on its side of the curve while the curve moves away from it.
std::vector<CPoint> detour_curve(const std::vector<CPoint>& verts, CPoint c, double rho) {
  const std::size_t m0 = verts.size();
  std::size_t seg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m0; ++k) {
    const double d = point_segment_distance(c, verts[k], verts[(k + 1) % m0]);
    if (d < best) {
      best = d;
      seg = k;
    }
  }
  // Rotate so the nearest segment sits mid-list; walks then never wrap.
  std::vector<CPoint> v(m0);
  const std::size_t shift = (seg + m0 - m0 / 2) % m0;
  for (std::size_t k = 0; k < m0; ++k) v[k] = verts[(k + shift) % m0];
  const std::size_t k = m0 / 2;
  const CPoint a = v[k], b = v[k + 1];
  const CPoint ab = b - a;
  const double t = std::clamp(std::real((c - a) * std::conj(ab)) / std::norm(ab), 0.0, 1.0);
  const CPoint p = a + t * ab;

  std::size_t i = k;
  while (i > 0 && std::abs(v[i] - c) <= rho) --i;
  std::size_t j = k + 1;
  while (j + 1 < m0 && std::abs(v[j] - c) <= rho) ++j;
  if (std::abs(v[i] - c) <= rho || std::abs(v[j] - c) <= rho) return verts;

  // Crossing of segment (outside -> inside) with the circle.
  auto cross = [&](CPoint out, CPoint in) {
    const CPoint d = in - out, f = out - c;
    const double A = std::norm(d), B = 2.0 * std::real(f * std::conj(d)), C = std::norm(f) - rho * rho;
    const double disc = std::max(0.0, B * B - 4.0 * A * C);
    const double s = (-B - std::sqrt(disc)) / (2.0 * A);
    return out + std::clamp(s, 0.0, 1.0) * d;
  };
  std::vector<CPoint> path;
  path.push_back(cross(v[i], i + 1 <= k ? v[i + 1] : p));
  for (std::size_t q = i + 1; q <= k; ++q) path.push_back(v[q]);
  path.push_back(p);
  for (std::size_t q = k + 1; q < j; ++q) path.push_back(v[q]);
  path.push_back(cross(v[j], j - 1 >= k + 1 ? v[j - 1] : p));
  double sweep = 0.0;
  for (std::size_t q = 0; q + 1 < path.size(); ++q) {
    if (path[q] == c || path[q + 1] == c) return verts;
    sweep += std::arg((path[q + 1] - c) / (path[q] - c));
  }
  const double th0 = std::arg(path.front() - c);
  const int n_arc = std::max(4, static_cast<int>(std::ceil(std::abs(sweep) / (M_PI / 16))));

  std::vector<CPoint> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  for (int q = 0; q <= n_arc; ++q) {
    const CPoint z = c + std::polar(rho, th0 + sweep * q / n_arc);
    if (std::abs(z - out.back()) > 1e-12 * rho) out.push_back(z);
  }
  for (std::size_t q = j; q < m0; ++q)
    if (std::abs(v[q] - out.back()) > 1e-12 * rho) out.push_back(v[q]);
  return out;
}

struct Traced {
  std::vector<std::vector<Sample>> components;
  std::vector<int> degrees;
};

Traced pull_one(const MapSpec& g, const std::vector<CPoint>& gam, const std::vector<CPoint>& crit_values,
                const PullbackOptions& opt) {
  const std::size_t m = gam.size();
  // Start at the vertex farthest from every critical value.
  std::size_t s = 0;
  double far = -1.0;
  for (std::size_t k = 0; k < m; ++k) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : crit_values) d = std::min(d, std::abs(gam[k] - c));
    if (d > far) {
      far = d;
      s = k;
    }
  }
  const std::vector<CPoint> roots = g.preimages(gam[s]);
  std::vector<std::vector<Sample>> strands(roots.size());
  for (std::size_t r = 0; r < roots.size(); ++r) strands[r] = trace_strand(g, gam, s, roots[r], opt);

  // Monodromy permutation: strand r ends at root perm[r].
  const double match = std::max(10.0 * opt.pb_tol, 1e-12);
  struct Pair {
    double d;
    std::size_t r, q;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < roots.size(); ++r)
    for (std::size_t q = 0; q < roots.size(); ++q) pairs.push_back({std::abs(strands[r].back().z - roots[q]), r, q});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return x.d != y.d ? x.d < y.d : (x.r != y.r ? x.r < y.r : x.q < y.q);
  });
  std::vector<int> perm(roots.size(), -1);
  std::vector<bool> used(roots.size(), false);
  for (const auto& p : pairs) {
    if (perm[p.r] >= 0 || used[p.q]) continue;
    if (p.d > match) throw Error(ErrorCode::StitchFailure, "strand endpoint does not return to a preimage");
    perm[p.r] = static_cast<int>(p.q);
    used[p.q] = true;
  }

  Traced out;
  std::vector<bool> done(roots.size(), false);
  for (std::size_t r0 = 0; r0 < roots.size(); ++r0) {
    if (done[r0]) continue;
    std::vector<Sample> poly;
    int count = 0;
    std::size_t r = r0;
    while (!done[r]) {
      done[r] = true;
      ++count;
      poly.insert(poly.end(), strands[r].begin(), strands[r].end() - 1);
      r = static_cast<std::size_t>(perm[r]);
    }
    if (r != r0) throw Error(ErrorCode::StitchFailure, "strand permutation is not closed");
    poly.push_back(poly.front());
    out.components.push_back(std::move(poly));
    out.degrees.push_back(count);
  }
  return out;
}

}  // namespace

int PullbackResult::degree_sum() const { return std::accumulate(local_degrees.begin(), local_degrees.end(), 0); }

PullbackOptions default_pullback_options(const ProperMapDomain& pm) {
  PullbackOptions o;
  const double s = pm.scale();
  o.pb_tol = pm.tol.pb_tol_rel * s;
  o.max_step = 2e-3 * s;
  o.chord_tol = 0.05 * o.max_step;
  o.cv_margin = pm.tol.cv_margin;
  o.bump = 2.0 * pm.tol.cv_margin * s;
  o.geom_eps_rel = pm.tol.geom_eps_rel;
  for (const auto& orbit : pm.critical_orbits) {
    const std::size_t n = std::min<std::size_t>(orbit.size(), 256);
    o.protect.insert(o.protect.end(), orbit.begin() + 1, orbit.begin() + static_cast<std::ptrdiff_t>(n));
  }
  for (const auto& cy : pm.cycles) o.protect.insert(o.protect.end(), cy.points.begin(), cy.points.end());
  return o;
}

PullbackOptions pullback_options_for_cell(const ProperMapDomain& pm, double cell) {
  PullbackOptions o = default_pullback_options(pm);
  o.max_step = cell;
  o.chord_tol = 0.05 * cell;
  return o;
}

PullbackResult pullback_curves(const MapSpec& g, const std::vector<JordanCurve>& targets, const PullbackOptions& opt) {
  std::vector<CPoint> crit_values;
  for (const auto& c : polynomial_roots(g.critical_equation())) {
    try {
      crit_values.push_back(g.eval(c));
    } catch (const Error&) {
    }
  }

  std::vector<CPoint> protect = crit_values;
  protect.insert(protect.end(), opt.protect.begin(), opt.protect.end());
  std::sort(protect.begin(), protect.end(), lex_less);
  protect.erase(std::unique(protect.begin(), protect.end(),
                            [&](CPoint a, CPoint b) { return std::abs(a - b) <= 1e-3 * opt.pb_tol; }),
                protect.end());

  PullbackResult res;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    std::vector<CPoint> gam = targets[ti].vertices();
    for (const auto& cv : crit_values) {
      const JordanCurve cur(gam, opt.geom_eps_rel);
      if (distance_to_curve(cur, cv) < opt.bump) {
        gam = detour_curve(gam, cv, opt.bump);
        ++res.bumps;
      }
    }
    Traced traced;
    for (int attempt = 0;; ++attempt) {
      try {
        traced = pull_one(g, gam, crit_values, opt);
        break;
      } catch (const CriticalHit& hit) {
        if (attempt >= opt.bump_retries) {
          throw Error(ErrorCode::CriticalValueOnCurve, "curve passes through a critical value");
        }
        CPoint cv = hit.w;
        for (const auto& c : crit_values)
          if (std::abs(c - hit.w) < std::abs(cv - hit.w) || cv == hit.w) cv = c;
        gam = detour_curve(gam, cv, opt.bump * std::pow(2.0, attempt + 1));
        ++res.bumps;
      }
    }
    for (std::size_t c = 0; c < traced.components.size(); ++c) {
      const auto kept = decimate(traced.components[c], opt.chord_tol, opt.max_step, protect);
      if (kept.size() > opt.vertex_cap) throw Error(ErrorCode::ContinuationDiverged, "component exceeds vertex cap");
      std::vector<CPoint> verts;
      verts.reserve(kept.size());
      for (const auto& s : kept) {
        verts.push_back(s.z);
        res.residual = std::max(res.residual, std::abs(g.eval(s.z) - s.w));
      }
      try {
        res.components.emplace_back(std::move(verts), opt.geom_eps_rel);
      } catch (const Error& e) {
        throw Error(ErrorCode::StitchFailure, std::string("stitched component is not a Jordan curve: ") + e.what());
      }
      res.local_degrees.push_back(traced.degrees[c]);
      res.parents.push_back(static_cast<int>(ti));
    }
  }
  if (res.residual >= opt.pb_tol) throw Error(ErrorCode::ContinuationDiverged, "pullback residual exceeds pb_tol");
  return res;
}

PullbackResult pullback_curve(const ProperMapDomain& pm, const JordanCurve& gamma) {
  return pullback_curves(pm.map, {gamma}, default_pullback_options(pm));
}

PullbackResult pullback_curve(const ProperMapDomain& pm, const JordanCurve& gamma, const PullbackOptions& opt) {
  return pullback_curves(pm.map, {gamma}, opt);
}

bool encloses(const std::vector<JordanCurve>& curves, const GridSet& s) {
  for (const auto k : s.occupied()) {
    const CPoint c = s.center(k);
    bool in = false;
    for (const auto& curve : curves) in = in || winding_number_unchecked(curve, c) != 0;
    if (!in) return false;
  }
  return true;
}

std::vector<PullbackResult> iterate_pullback(const ProperMapDomain& pm, const JordanCurve& gamma0, int n_max) {
  return iterate_pullback(pm, std::vector<JordanCurve>{gamma0}, n_max, default_pullback_options(pm));
}

std::vector<PullbackResult> iterate_pullback(const ProperMapDomain& pm, const std::vector<JordanCurve>& gamma0,
                                             int n_max, const PullbackOptions& opt) {
  if (pm.mode == DomainMode::Single && !pm.postcritical.empty() && !encloses(gamma0, pm.postcritical)) {
    throw Error(ErrorCode::InvalidArgument, "initial curve does not enclose the postcritical set");
  }
  std::vector<PullbackResult> levels;
  std::vector<JordanCurve> cur = gamma0;
  for (int n = 1; n <= n_max; ++n) {
    PullbackResult r = pullback_curves(pm.map, cur, opt);
    r.level = n;
    cur = r.components;
    levels.push_back(std::move(r));
  }
  return levels;
}

}  // namespace plkit
