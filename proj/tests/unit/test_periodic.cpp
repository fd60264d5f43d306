#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "plkit/formula.hpp"
#include "plkit/invariants.hpp"
#include "plkit/periodic.hpp"

using namespace plkit;

namespace {

ProperMapDomain disk_domain(const std::string& f, double r, DomainMode mode = DomainMode::Single) {
  BuildOptions opt;
  opt.mode = mode;
  return build_proper_map(parse_map(f), Region::disk(0.0, r), opt);
}

GridSet range_shape(const ProperMapDomain& pm, int res) {
  const Box sq = pm.range.bbox().squared();
  return GridSet::square(sq.center(), 0.5 * sq.width() * 1.02, res);
}

double nearest(const std::vector<CPoint>& pts, CPoint z) {
  double best = INFINITY;
  for (const auto& p : pts) best = std::min(best, std::abs(p - z));
  return best;
}

// (g^p)'(z) from composed coefficients.
CPoint composed_derivative(const std::vector<CPoint>& g, int p, CPoint z) {
  std::vector<CPoint> it = g;
  for (int k = 1; k < p; ++k) it = oracle::compose(g, it);
  CPoint d = 0.0;
  for (int k = static_cast<int>(it.size()) - 1; k >= 1; --k) d = d * z + static_cast<double>(k) * it[k];
  return d;
}

void check_orbit_valid(const MapSpec& g, const PeriodicOrbit& o, const Tolerances& tol) {
  REQUIRE(static_cast<int>(o.points.size()) == o.period);
  CPoint prod = 1.0;
  for (int i = 0; i < o.period; ++i) {
    CHECK(std::abs(g.eval(o.points[i]) - o.points[(i + 1) % o.period]) < tol.cycle_tol);
    prod *= g.deriv(o.points[i]);
  }
  CHECK(std::abs(prod - o.multiplier) <= 1e-8 * std::max(1.0, std::abs(prod)));
  const double m = std::abs(o.multiplier);
  if (m > 1.0 + tol.mult_tol) CHECK(o.kind == OrbitKind::Repelling);
  else if (m < tol.mult_tol) CHECK(o.kind == OrbitKind::Superattracting);
  else if (m < 1.0 - tol.mult_tol) CHECK(o.kind == OrbitKind::Attracting);
  else CHECK(o.kind == OrbitKind::Indifferent);
}

}  // namespace

TEST_SUITE("periodic") {
  TEST_CASE("z^2 period 2 on the disk of radius 1.5") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto scan = find_periodic(pm, 2, Region::disk(0.0, 1.5));
    // Roots of z^4 = z.
    CHECK(scan.dividing_points.size() == 4);
    for (const CPoint z : {CPoint(0.0), CPoint(1.0), std::polar(1.0, 2.0 * M_PI / 3.0), std::polar(1.0, 4.0 * M_PI / 3.0)})
      CHECK(nearest(scan.dividing_points, z) < 1e-10);
    REQUIRE(scan.orbits.size() == 1);
    const auto& o = scan.orbits[0];
    CHECK(o.period == 2);
    CHECK(std::abs(o.multiplier - 4.0) < 1e-9);
    CHECK(o.kind == OrbitKind::Repelling);
    CHECK(scan.bound == 4);
  }

  TEST_CASE("z^2-1 superattracting 2-cycle") {
    const auto pm = disk_domain("z^2-1", 4.0);
    const auto scan = find_periodic(pm, 2, pm.range);
    bool found = false;
    for (const auto& o : scan.orbits)
      if (nearest(o.points, 0.0) < 1e-10 && nearest(o.points, -1.0) < 1e-10) {
        found = true;
        CHECK(std::abs(o.multiplier) < 1e-10);
        CHECK(o.kind == OrbitKind::Superattracting);
      }
    CHECK(found);
  }

  TEST_CASE("z^2-0.5 fixed points") {
    const auto pm = disk_domain("z^2-0.5", 4.0);
    const auto scan = find_periodic(pm, 1, pm.range);
    REQUIRE(scan.orbits.size() == 2);
    const double r = std::sqrt(3.0);
    for (const auto& o : scan.orbits) {
      const CPoint z = o.points[0];
      CHECK(std::min(std::abs(z - (1.0 + r) / 2.0), std::abs(z - (1.0 - r) / 2.0)) < 1e-12);
      CHECK(std::abs(o.multiplier - 2.0 * z) < 1e-12);
      CHECK(o.kind == (z.real() > 0 ? OrbitKind::Repelling : OrbitKind::Attracting));
    }
  }

  TEST_CASE("periodic points match the Durand-Kerner oracle and respect d^p") {
    oracle::Gen gen(41);
    for (int t = 0; t < 8; ++t) {
      const int d = gen.integer(2, 3);
      std::vector<CPoint> co(d + 1, 0.0);
      for (int k = 0; k < d; ++k) co[k] = gen.in_disk(0.0, 0.4);
      co[d] = 1.0;
      const auto pm = build_proper_map(MapSpec::polynomial(co), Region::disk(0.0, 4.0));
      const int pmax = d == 2 ? 4 : 3;
      for (int p = 1; p <= pmax; ++p) {
        const auto scan = find_periodic(pm, p, pm.range);
        CHECK(scan.dividing_points.size() <= scan.bound);
        CHECK(scan.bound == static_cast<std::size_t>(std::pow(d, p)));
        const auto roots = oracle::periodic_points(co, p);
        for (const auto& z : roots)
          if (pm.in_range(z)) CHECK(nearest(scan.dividing_points, z) < 1e-7);
        for (const auto& z : scan.dividing_points) CHECK(nearest(roots, z) < 1e-7);
        for (const auto& o : scan.orbits) check_orbit_valid(pm.map, o, pm.tol);
      }
    }
  }

  TEST_CASE("chained multiplier equals the derivative of the iterate") {
    oracle::Gen gen(43);
    const std::vector<CPoint> g{CPoint(-0.12, 0.75), 0.0, 1.0};
    const MapSpec spec = MapSpec::polynomial(g);
    for (int t = 0; t < 20; ++t) {
      const CPoint z = gen.in_disk(0.0, 1.0);
      const int p = gen.integer(1, 4);
      const CPoint a = chain_multiplier(spec, z, p), b = composed_derivative(g, p, z);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
  }

  TEST_CASE("main step holds for z^2") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto K = nonescaping_set(pm, Region::disk(0.0, 2.0), 1024, 200);
    const auto r = verify_mainstep(pm, K, 8);
    CHECK(r.pass);
    CHECK(r.witnesses.empty());
    REQUIRE(r.dividing_counts.size() == 8);
    // z^(2^p) = z: 0 plus the 2^p - 1 roots of unity.
    for (int p = 1; p <= 8; ++p) CHECK(r.dividing_counts[p - 1] == static_cast<std::size_t>(1u << p));
  }

  TEST_CASE("main step holds for the basilica") {
    const auto pm = disk_domain("z^2-1", 4.0);
    const auto v = classify(pm, JordanCurve::circle(0.0, 3.6, 512), 12);
    const auto cert = certify_pl_restriction(pm, v);
    const auto ks = compute_kstar_detailed(pm, cert, range_shape(pm, 1024), 48);
    const auto K = invariance_flags(pm, ks.outer);
    const auto r = verify_mainstep(pm, K, 6);
    CHECK(r.pass);
    CHECK(r.repelling_checked > 0);
  }

  TEST_CASE("main step makes no claim when the critical point escapes") {
    const auto pm = disk_domain("z^2-3", 2.5, DomainMode::Multi);
    const auto K = nonescaping_set(pm, domain_region(pm), range_shape(pm, 1024), 4);
    try {
      verify_mainstep(pm, K, 4);
      FAIL("expected HypothesesNotMet");
    } catch (const HypothesesNotMetError& e) {
      CHECK(e.code() == ErrorCode::HypothesesNotMet);
      CHECK(e.failed_flag == "contains_critical");
    }
  }

  TEST_CASE("backward orbits of z^2 toward 1 are principal square roots") {
    const auto pm = disk_domain("z^2", 8.0);
    const auto a = make_orbit(pm.map, 1.0, 1, pm.tol.mult_tol);
    for (const double z0 : {4.0, 0.25}) {
      const auto seq = backward_orbit_to_repeller(pm, a, z0, 20);
      REQUIRE(seq.size() >= 21);
      for (int n = 0; n <= 20; ++n) CHECK(std::abs(seq[n] - std::pow(z0, std::pow(2.0, -n))) < 1e-12);
    }
  }

  TEST_CASE("backward orbit contraction rate is 1/|lambda|") {
    struct Case {
      const char* f;
      CPoint a;
      CPoint z;
    };
    const double s3 = std::sqrt(3.0), s5 = std::sqrt(5.0);
    const Case cases[] = {{"z^2", 1.0, 0.3},
                          {"z^2-0.5", (1.0 + s3) / 2.0, 0.1},
                          {"z^2-1", (1.0 + s5) / 2.0, CPoint(0.5, 1.0)},
                          {"z^2+0.24", 0.6, 1.2}};
    for (const auto& c : cases) {
      const auto pm = disk_domain(c.f, 4.0);
      const auto a = make_orbit(pm.map, c.a, 1, pm.tol.mult_tol);
      REQUIRE(a.kind == OrbitKind::Repelling);
      const auto seq = backward_orbit_to_repeller(pm, a, c.z, 21);
      const double ratio = std::abs(seq[21] - c.a) / std::abs(seq[20] - c.a);
      CHECK(oracle::rel_err(ratio, 1.0 / std::abs(a.multiplier)) <= 0.02);
      CHECK(std::abs(seq[20] - c.a) < std::pow(std::abs(a.multiplier), -10.0) * std::abs(c.z - c.a));
    }
  }
}
