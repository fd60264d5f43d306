#include <doctest.h>

#include "oracles.hpp"
#include "plkit/formula.hpp"
#include "plkit/invariants.hpp"
#include "plkit/trichotomy.hpp"

using namespace plkit;

namespace {

ProperMapDomain disk_domain(const std::string& f, double r, DomainMode mode = DomainMode::Single) {
  BuildOptions opt;
  opt.mode = mode;
  return build_proper_map(parse_map(f), Region::disk(0.0, r), opt);
}

bool inside_any(const std::vector<JordanCurve>& cs, CPoint z) {
  for (const auto& c : cs)
    if (winding_number_unchecked(c, z) != 0) return true;
  return false;
}

}  // namespace

TEST_SUITE("trichotomy") {
  TEST_CASE("z^2 with a circle of radius 2.5 nests at the first level") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto v = classify(pm, JordanCurve::circle(0.0, 2.5, 512), 3);
    CHECK(v.verdict == Verdict::B);
    CHECK(v.witness_n == 1);
    REQUIRE(v.nesting);
    CHECK(oracle::rel_err(v.nesting->margin, 2.5 - std::sqrt(2.5)) <= 0.01);
    CHECK(v.intersections.empty());
    CHECK_FALSE(v.attracting);
  }

  TEST_CASE("z^2+0.5z with a small circle gives an attracting fixed point") {
    const auto pm = disk_domain("z^2+0.5z", 4.0);
    const auto v = classify(pm, JordanCurve::circle(0.0, 0.1, 512), 2);
    CHECK(v.verdict == Verdict::C);
    CHECK(v.witness_n == 1);
    REQUIRE(v.attracting);
    CHECK(std::abs(v.attracting->a) < 1e-9);
    CHECK(std::abs(v.attracting->multiplier - 0.5) < 1e-9);
    CHECK_FALSE(v.nesting);
  }

  TEST_CASE("injected crossing curves give verdict A") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto gamma0 = JordanCurve::circle(0.0, 1.0, 256);
    CurveProvider crossing = [](int n, const std::vector<JordanCurve>&) {
      return std::vector<JordanCurve>{JordanCurve::circle(CPoint(0.3 + 0.01 * n, 0.0), 1.0, 256)};
    };
    const auto v = classify(pm, gamma0, 12, crossing);
    CHECK(v.verdict == Verdict::A);
    REQUIRE(v.intersections.size() == 12);
    for (int n = 1; n <= 12; ++n) {
      CHECK(v.intersections[n - 1].n == n);
      CHECK_FALSE(v.intersections[n - 1].points.empty());
    }
    CHECK(v.witness_n == 0);
  }

  TEST_CASE("injected side-by-side curves leave the verdict unresolved") {
    const auto pm = disk_domain("z^2", 4.0);
    CurveProvider aside = [](int, const std::vector<JordanCurve>&) {
      return std::vector<JordanCurve>{JordanCurve::circle(CPoint(3.0, 0.0), 0.5, 64)};
    };
    const auto v = classify(pm, JordanCurve::circle(0.0, 1.0, 256), 5, aside);
    CHECK(v.verdict == Verdict::Unresolved);
    CHECK_FALSE(v.note.empty());
  }

  TEST_CASE("gamma0 must enclose the postcritical set") {
    const auto pm = disk_domain("z^2-1", 4.0);
    CHECK_THROWS_AS(classify(pm, JordanCurve::circle(CPoint(2.0, 0.0), 0.5, 128), 3), Error);
  }

  TEST_CASE("certificate for z^2 at n = 1") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto v = classify(pm, JordanCurve::circle(0.0, 2.5, 512), 3);
    const auto cert = certify_pl_restriction(pm, v);
    CHECK(cert.degree == 2);
    CHECK(cert.n_used == 1);
    REQUIRE(cert.inner_components.size() == 1);
    for (const auto& z : cert.outer.vertices()) CHECK(std::abs(std::abs(z) - 2.5) < 1e-9);
    // Inner vertices are exact preimages of points of the outer polyline.
    for (const auto& z : cert.inner_components[0].vertices()) {
      CHECK(distance_to_curve(cert.outer, pm.map.eval(z)) < pm.pb_tol());
      CHECK(std::abs(z) <= std::sqrt(2.5) + 1e-9);
    }
    CHECK(oracle::rel_err(cert.margin, 2.5 - std::sqrt(2.5)) <= 1e-3);
  }

  TEST_CASE("certificate for z^2-2 with a circle of radius 4") {
    const auto pm = disk_domain("z^2-2", 6.0);
    const auto v = classify(pm, JordanCurve::circle(0.0, 4.0, 512), 4);
    REQUIRE(v.verdict == Verdict::B);
    const auto cert = certify_pl_restriction(pm, v);
    CHECK(cert.margin > 0.0);
    for (const auto& c : cert.inner_components) CHECK(nesting_relation(c, cert.outer) == Nesting::BInside);
    CHECK(inside_any(cert.inner_components, 0.0));
    CHECK(inside_any(cert.inner_components, 1.999));
  }

  TEST_CASE("z^2-2 first nests at level 2 and is certified through the Omega sweep") {
    const auto pm = disk_domain("z^2-2", 6.0);
    const auto v = classify(pm, JordanCurve::circle(CPoint(0.5, 0.0), 2.6, 512), 6);
    REQUIRE(v.verdict == Verdict::B);
    CHECK(v.witness_n == 2);
    const auto cert = certify_pl_restriction(pm, v);
    CHECK(cert.margin > 0.0);
    CHECK(cert.j_used >= 1);
    CHECK(cert.degree == 2);
    for (const auto& c : cert.inner_components) CHECK(nesting_relation(c, cert.outer) == Nesting::BInside);
  }

  TEST_CASE("certificate soundness: re-pulling the outer curve reproduces the inner curves") {
    for (const char* f : {"z^2", "z^2-1", "z^2+0.24"}) {
      const auto pm = disk_domain(f, 4.0);
      const auto v = classify(pm, JordanCurve::circle(0.0, 3.6, 512), 12);
      REQUIRE(v.verdict == Verdict::B);
      const auto cert = certify_pl_restriction(pm, v);
      const auto again = pullback_curve(pm, cert.outer, pullback_options_for_cell(pm, cert.pullback_cell));
      REQUIRE(again.components.size() == cert.inner_components.size());
      CHECK(hausdorff_distance(again.components, cert.inner_components) < 10.0 * pm.pb_tol());
      double margin = INFINITY;
      for (const auto& c : again.components) margin = std::min(margin, curve_distance(c, cert.outer));
      CHECK(oracle::rel_err(margin, cert.margin) <= 1e-6);
      // Critical points of the restriction sit inside V'.
      for (const auto& c : pm.critical_points)
        if (inside(cert.outer, c)) CHECK(inside_any(cert.inner_components, c));
    }
  }

  TEST_CASE("attracting fixed points") {
    {
      // Proper only on a large disk: preimages of |w| = 20 have |z| near 14.
      const auto pm = disk_domain("0.3z+0.1z^2", 20.0);
      // The critical orbit passes through -0.225.
      const auto v = classify(pm, JordanCurve::circle(0.0, 0.5, 256), 3);
      REQUIRE(v.verdict == Verdict::C);
      const auto [a, m] = locate_attracting_fixed_point(pm, v);
      CHECK(std::abs(a) < 1e-12);
      CHECK(std::abs(m - 0.3) < 1e-12);
    }
    {
      const auto pm = disk_domain("z^2-0.5", 4.0);
      const auto v = classify(pm, JordanCurve::circle(CPoint(-0.2, 0.0), 0.4, 256), 6);
      REQUIRE(v.verdict == Verdict::C);
      const auto [a, m] = locate_attracting_fixed_point(pm, v);
      const double fixed = (1.0 - std::sqrt(3.0)) / 2.0;
      CHECK(std::abs(a - fixed) < 1e-12);
      CHECK(std::abs(std::abs(m) - 2.0 * std::abs(fixed)) < 1e-12);
    }
  }

  TEST_CASE("repelling points of z^2 near the unit circle") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto hits = scan_repelling_near_curve(pm, JordanCurve::circle(0.0, 1.0, 512), 0.05, 1, 4);
    for (int n = 1; n <= 4; ++n) {
      const int m = (1 << n) - 1;
      std::vector<CPoint> found;
      for (const auto& h : hits)
        if (h.n == n) {
          found.push_back(h.z);
          CHECK(std::abs(std::abs(h.multiplier) - (1 << n)) < 1e-8);
        }
      // Closed form: e^{2 pi i k / (2^n - 1)}.
      CHECK(found.size() == static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) {
        const CPoint root = std::polar(1.0, 2.0 * M_PI * k / m);
        double best = INFINITY;
        for (const auto& z : found) best = std::min(best, std::abs(z - root));
        CHECK(best < 1e-10);
      }
    }
  }

  TEST_CASE("no repelling points near curves away from K") {
    const auto pm = disk_domain("z^2-0.5", 4.0);
    CHECK(scan_repelling_near_curve(pm, JordanCurve::circle(0.0, 1.9, 512), 0.05, 1, 4).empty());
    const auto pm0 = disk_domain("z^2", 4.0);
    CHECK(scan_repelling_near_curve(pm0, JordanCurve::circle(0.0, 0.5, 512), 0.05, 1, 4).empty());
  }

  TEST_CASE("verdicts are deterministic") {
    const auto pm = disk_domain("z^2-1", 4.0);
    const auto gamma0 = JordanCurve::circle(0.0, 3.0, 512);
    const auto a = classify(pm, gamma0, 6), b = classify(pm, gamma0, 6);
    CHECK(a.verdict == b.verdict);
    CHECK(a.witness_n == b.witness_n);
    REQUIRE(a.levels.size() == b.levels.size());
    for (std::size_t n = 0; n < a.levels.size(); ++n)
      for (std::size_t c = 0; c < a.levels[n].size(); ++c) CHECK(a.levels[n][c].vertices() == b.levels[n][c].vertices());
  }

  TEST_CASE("no attracting verdict for curves close to the range boundary") {
    const char* corpus[] = {"z^2", "z^2-1", "z^2+0.24", "z^2-0.5", "z^2+0.5z", "z^2-2", "z^3-0.5z"};
    for (const char* f : corpus) {
      const auto pm = disk_domain(f, 4.0);
      const auto v = classify(pm, JordanCurve::circle(0.0, 3.7, 512), 6);
      CHECK(v.verdict != Verdict::C);
    }
  }

  TEST_CASE("K sits inside V' and escape time from V' reproduces it") {
    for (const char* f : {"z^2", "z^2-1"}) {
      const auto pm = disk_domain(f, 4.0);
      const auto v = classify(pm, JordanCurve::circle(0.0, 3.6, 512), 12);
      const auto cert = certify_pl_restriction(pm, v);
      const GridSet shape = GridSet::square(0.0, 2.0, 256);
      const auto K = nonescaping_set(pm, domain_region(pm), shape, 200);
      REQUIRE(K.contains_critical);
      for (const auto idx : K.K.occupied()) CHECK(inside_any(cert.inner_components, K.K.center(idx)));
      const auto Kv = nonescaping_set(pm, Region::interior(cert.inner_components), shape, 200);
      CHECK(hausdorff_cells(K.K, Kv.K) <= 1.0);
    }
  }

  TEST_CASE("multi-component restriction for a Cantor example") {
    const auto pm = disk_domain("z^2-3", 2.5, DomainMode::Multi);
    const auto v = classify(pm, JordanCurve::circle(0.0, 2.4, 512), 4);
    CHECK(v.verdict == Verdict::B);
    CHECK(v.witness_n == 1);
    const auto cert = certify_pl_restriction(pm, v);
    CHECK(cert.inner_components.size() == 2);
    CHECK(cert.degree == 2);
    CHECK(cert.margin > 0.0);
  }

  TEST_CASE("closed rasterization covers the curve") {
    const GridSet shape = GridSet::square(0.0, 1.5, 128);
    const auto c = JordanCurve::circle(0.0, 1.0, 512);
    const GridSet r = rasterize_closed({c}, shape);
    CHECK(rasterize_interior({c}, shape).subset_of(r));
    for (const auto& z : c.vertices()) CHECK(r.near(z, 1));
  }
}
