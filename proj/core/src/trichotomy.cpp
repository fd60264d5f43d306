#include "plkit/trichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plkit {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::A: return "A";
    case Verdict::B: return "B";
    case Verdict::C: return "C";
    case Verdict::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

GridSet rasterize_closed(const std::vector<JordanCurve>& curves, const GridSet& shape) {
  return rasterize_interior(curves, shape).united(rasterize_collar(curves, shape, 0.55 * shape.cell_size()));
}

CurveProvider pullback_provider(const ProperMapDomain& pm) { return pullback_provider(pm, default_pullback_options(pm)); }

CurveProvider pullback_provider(const ProperMapDomain& pm, const PullbackOptions& opt) {
  const MapSpec g = pm.map;
  return [g, opt](int, const std::vector<JordanCurve>& prev) { return pullback_curves(g, prev, opt).components; };
}

namespace {

double min_distance(const std::vector<JordanCurve>& inner, const JordanCurve& outer) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : inner) m = std::min(m, curve_distance(c, outer));
  return m;
}

bool all_inside(const std::vector<JordanCurve>& inner, const JordanCurve& outer) {
  for (const auto& c : inner)
    if (nesting_relation(c, outer) != Nesting::BInside) return false;
  return true;
}

// Critical points inside V must lie in V'.
bool critical_points_covered(const ProperMapDomain& pm, const JordanCurve& outer,
                             const std::vector<JordanCurve>& inner) {
  for (const auto& c : pm.critical_points) {
    if (!inside(outer, c)) continue;
    bool in = false;
    for (const auto& k : inner) in = in || winding_number_unchecked(k, c) != 0;
    if (!in) return false;
  }
  return true;
}

}  // namespace

TrichotomyVerdict classify(const ProperMapDomain& pm, const JordanCurve& gamma0, int n_max) {
  return classify(pm, gamma0, n_max, pullback_provider(pm));
}

TrichotomyVerdict classify(const ProperMapDomain& pm, const JordanCurve& gamma0, int n_max,
                           const CurveProvider& provider) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
  for (const auto& v : gamma0.vertices())
    if (!pm.in_range(v)) throw Error(ErrorCode::InvalidArgument, "initial curve leaves the range");
  if (pm.mode == DomainMode::Single && !pm.postcritical.empty() && !encloses({gamma0}, pm.postcritical)) {
    throw Error(ErrorCode::InvalidArgument, "initial curve does not enclose the postcritical set");
  }

  TrichotomyVerdict out;
  out.gamma0 = {gamma0};
  std::vector<JordanCurve> prev{gamma0};
  int a_levels = 0;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<JordanCurve> cur = provider(n, prev);
    if (cur.empty()) throw Error(ErrorCode::InvalidArgument, "curve provider returned no curves");
    out.levels.push_back(cur);

    std::vector<Nesting> rel;
    for (const auto& c : cur) rel.push_back(nesting_relation(c, gamma0));
    const bool c_case = std::any_of(rel.begin(), rel.end(), [](Nesting r) { return r == Nesting::COutside; });
    const bool b_case = std::all_of(rel.begin(), rel.end(), [](Nesting r) { return r == Nesting::BInside; });
    if (c_case) {
      out.verdict = Verdict::C;
      out.witness_n = n;
      out.intersections.clear();
      const auto [a, lambda] = locate_attracting_fixed_point(pm, out);
      out.attracting = AttractingEvidence{a, lambda, {}};
      CPoint z = gamma0.centroid();
      for (int k = 0; k < 64 && std::abs(z - a) > pm.tol.cycle_tol; ++k) {
        out.attracting->trace.push_back(z);
        z = pm.map.eval(z);
      }
      out.attracting->trace.push_back(z);
      return out;
    }
    if (b_case) {
      out.verdict = Verdict::B;
      out.witness_n = n;
      out.intersections.clear();
      PLCertificate cert;
      cert.outer = gamma0;
      cert.inner_components = cur;
      cert.margin = min_distance(cur, gamma0);
      cert.degree = 1;
      for (int k = 0; k < n; ++k) cert.degree *= pm.degree;
      cert.n_used = n;
      out.nesting = cert;
      return out;
    }
    std::vector<CPoint> pts;
    for (std::size_t k = 0; k < cur.size(); ++k)
      if (rel[k] == Nesting::AIntersect) {
        const auto ip = intersection_points(cur[k], gamma0);
        pts.insert(pts.end(), ip.begin(), ip.end());
      }
    if (!pts.empty() || std::any_of(rel.begin(), rel.end(), [](Nesting r) { return r == Nesting::AIntersect; })) {
      out.intersections.push_back({n, pts});
      ++a_levels;
    }
    prev = std::move(cur);
  }
  if (a_levels == n_max) {
    out.verdict = Verdict::A;
  } else {
    out.verdict = Verdict::Unresolved;
    out.note = "no nesting up to n_max and intersections at " + std::to_string(a_levels) + " of " +
               std::to_string(n_max) + " levels";
  }
  return out;
}

PLCertificate certify_pl_restriction(const ProperMapDomain& pm, const TrichotomyVerdict& verdict,
                                     const CertifyOptions& opt) {
  if (verdict.verdict != Verdict::B || verdict.witness_n < 1 || verdict.gamma0.empty()) {
    throw Error(ErrorCode::InvalidArgument, "certification needs a B verdict");
  }
  const int n = verdict.witness_n;
  const JordanCurve& gamma0 = verdict.gamma0.front();
  const Box sq = pm.range.bbox().squared();
  const GridSet shape = GridSet::square(sq.center(), 0.5 * sq.width() * 1.02, opt.resolution);
  const PullbackOptions popt = pullback_options_for_cell(pm, shape.cell_size());

  if (n == 1) {
    const PullbackResult pre = pullback_curves(pm.map, {gamma0}, popt);
    PLCertificate cert;
    cert.outer = gamma0;
    cert.inner_components = pre.components;
    cert.local_degrees = pre.local_degrees;
    cert.margin = min_distance(pre.components, gamma0);
    cert.degree = pre.degree_sum();
    cert.n_used = 1;
    cert.pullback_cell = shape.cell_size();
    if (!all_inside(pre.components, gamma0) || !(cert.margin > 0.0) ||
        !critical_points_covered(pm, gamma0, pre.components)) {
      throw CertificationFailedError("preimage of the initial curve is not compactly contained", cert.margin);
    }
    return cert;
  }

  // Omega_j = union of V_{-i}, i = j .. j+n-1; hull, dilate, pull back once.
  std::vector<std::vector<JordanCurve>> levels{verdict.gamma0};
  for (const auto& l : verdict.levels) levels.push_back(l);
  double best_margin = -std::numeric_limits<double>::infinity();
  std::string last_issue = "no candidate";
  for (int j = 1; j <= opt.j_max; ++j) {
    while (static_cast<int>(levels.size()) <= j + n - 1) {
      levels.push_back(pullback_curves(pm.map, levels.back(), popt).components);
    }
    GridSet omega = shape.empty_like();
    for (int i = j; i <= j + n - 1; ++i) omega = omega.united(rasterize_closed(levels[i], shape));
    if (omega.empty()) continue;
    const GridSet hull = topological_hull(omega);
    for (const double r : opt.dilations) {
      const GridSet y = topological_hull(dilate(hull, r));
      std::vector<int> labels;
      if (label_components(y, labels) != 1) {
        last_issue = "dilated hull is disconnected";
        continue;
      }
      try {
        const JordanCurve outer = outer_boundary(y);
        const PullbackResult pre = pullback_curves(pm.map, {outer}, popt);
        const double margin = min_distance(pre.components, outer);
        const bool nested = all_inside(pre.components, outer);
        if (nested) best_margin = std::max(best_margin, margin);
        if (nested && margin > 0.0 && critical_points_covered(pm, outer, pre.components)) {
          PLCertificate cert;
          cert.outer = outer;
          cert.inner_components = pre.components;
          cert.local_degrees = pre.local_degrees;
          cert.margin = margin;
          cert.degree = pre.degree_sum();
          cert.n_used = n;
          cert.j_used = j;
          cert.dilation_cells = r;
          cert.pullback_cell = shape.cell_size();
          return cert;
        }
        last_issue = nested ? "critical point outside the preimage" : "preimage not nested";
      } catch (const Error& e) {
        last_issue = e.what();
      }
    }
  }
  throw CertificationFailedError("no certified restriction up to j_max (" + last_issue + ")", best_margin);
}

std::pair<CPoint, CPoint> locate_attracting_fixed_point(const ProperMapDomain& pm, const TrichotomyVerdict& verdict) {
  if (verdict.gamma0.empty()) throw Error(ErrorCode::InvalidArgument, "verdict carries no initial curve");
  CPoint z = verdict.gamma0.front().centroid();
  const double tol = pm.tol.cycle_tol;
  bool converged = false;
  for (int k = 0; k < pm.tol.orbit_horizon; ++k) {
    const CPoint next = pm.map.eval(z);
    if (!is_finite(next)) break;
    const double step = std::abs(next - z);
    z = next;
    if (step < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "orbit of the curve center did not settle");
  for (int k = 0; k < 8; ++k) {
    CPoint v, d1, d2;
    pm.map.eval2(z, v, d1, d2);
    if (std::abs(d1 - 1.0) == 0.0) break;
    const CPoint step = (v - z) / (d1 - 1.0);
    z -= step;
    if (std::abs(step) < 1e-17) break;
  }
  const CPoint lambda = pm.map.deriv(z);
  if (std::abs(pm.map.eval(z) - z) >= tol || std::abs(lambda) >= 1.0) {
    throw Error(ErrorCode::NoConvergence, "limit point is not an attracting fixed point");
  }
  return {z, lambda};
}

std::vector<RepellingHit> scan_repelling_near_curve(const ProperMapDomain& pm, const JordanCurve& gamma0, double eps,
                                                    int n_lo, int n_hi) {
  if (!(eps > 0.0) || n_lo < 1 || n_hi < n_lo) throw Error(ErrorCode::InvalidArgument, "bad collar scan parameters");
  const double len = gamma0.length();
  const double spacing = std::max(0.5 * eps, len / 4000.0);
  std::vector<CPoint> seeds;
  const std::size_t m = gamma0.size();
  for (std::size_t k = 0; k < m; ++k) {
    const CPoint a = gamma0[k], b = gamma0.next(k);
    const double el = std::abs(b - a);
    const CPoint nrm = CPoint(0, 1) * (b - a) / el;
    const int parts = std::max(1, static_cast<int>(std::ceil(el / spacing)));
    for (int q = 0; q < parts; ++q) {
      const CPoint p = a + (b - a) * (double(q) / parts);
      for (const double off : {-1.0, -0.5, 0.0, 0.5, 1.0}) seeds.push_back(p + off * eps * nrm);
    }
  }

  const double scale = pm.scale();
  const double dedup = pm.tol.dedup_tol_rel * scale;
  std::vector<RepellingHit> hits;
  for (int n = n_lo; n <= n_hi; ++n) {
    std::vector<RepellingHit> found(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      CPoint z = seeds[s];
      try {
        for (int it = 0; it < 80; ++it) {
          CPoint w = z, d = 1.0;
          for (int k = 0; k < n; ++k) {
            d *= pm.map.deriv(w);
            w = pm.map.eval(w);
            if (!is_finite(w) || std::abs(w) > 1e6 * scale) throw Error(ErrorCode::OrbitEscaped, "");
          }
          const CPoint f = w - z, fd = d - 1.0;
          if (std::abs(fd) == 0.0) break;
          CPoint step = f / fd;
          if (std::abs(step) > 2.0 * eps) step *= 2.0 * eps / std::abs(step);
          z -= step;
          if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        CPoint w = z, lambda = 1.0;
        for (int k = 0; k < n; ++k) {
          lambda *= pm.map.deriv(w);
          w = pm.map.eval(w);
        }
        if (std::abs(w - z) < 1e-10 * std::max(1.0, scale) && pm.in_range(z) &&
            std::abs(lambda) > 1.0 + pm.tol.mult_tol && distance_to_curve(gamma0, z) <= eps) {
          found[s] = {n, z, lambda};
          ok[s] = 1;
        }
      } catch (const Error&) {
      }
    }
    std::vector<RepellingHit> level;
    for (std::size_t s = 0; s < seeds.size(); ++s)
      if (ok[s]) level.push_back(found[s]);
    std::sort(level.begin(), level.end(), [](const RepellingHit& x, const RepellingHit& y) { return lex_less(x.z, y.z); });
    std::vector<RepellingHit> uniq;
    for (const auto& h : level) {
      bool dup = false;
      for (const auto& u : uniq) dup = dup || std::abs(u.z - h.z) < dedup;
      if (!dup) uniq.push_back(h);
    }
    hits.insert(hits.end(), uniq.begin(), uniq.end());
  }
  return hits;
}

}  // namespace plkit
