#include <doctest.h>

#include "oracles.hpp"
#include "plkit/ergodic.hpp"
#include "plkit/formula.hpp"
#include "plkit/invariants.hpp"

using namespace plkit;

namespace {

ProperMapDomain quad(CPoint c, double r) { return build_proper_map(MapSpec::polynomial({c, 0.0, 1.0}), Region::disk(0.0, r)); }

GridSet unit_circle(int n) {
  const GridSet shape = GridSet::square(0.0, 1.1, n);
  return rasterize_collar({JordanCurve::circle(0.0, 1.0, 4096)}, shape, 0.55 * shape.cell_size());
}

GridSet unit_disk(int n) {
  return rasterize_interior({JordanCurve::circle(0.0, 1.0, 4096)}, GridSet::square(0.0, 1.1, n));
}

// Cells meeting [a, b] on the real axis.
GridSet interval(double a, double b, int n, double hw) {
  GridSet s = GridSet::square(0.0, hw, n);
  const double h = s.cell_size();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const CPoint c = s.center(i, j);
      if (std::abs(c.imag()) <= 0.55 * h && c.real() >= a - 0.5 * h && c.real() <= b + 0.5 * h) s.set(i, j);
    }
  return s;
}

GridSet filled_julia(const ProperMapDomain& pm, int res) {
  const Box sq = pm.range.bbox().squared();
  return nonescaping_set(pm, domain_region(pm), GridSet::square(sq.center(), 0.5 * sq.width() * 1.02, res), 200).K;
}

// Pairs that never separate by more than delta in the first k iterates.
std::size_t brute_force_violations(const MapSpec& g, const std::vector<CPoint>& Q, int k, double delta) {
  std::vector<std::vector<CPoint>> orbits;
  for (const auto& z : Q) {
    std::vector<CPoint> o{z};
    for (int j = 0; j < k; ++j) o.push_back(g.eval(o.back()));
    orbits.push_back(std::move(o));
  }
  std::size_t bad = 0;
  for (std::size_t a = 0; a < Q.size(); ++a)
    for (std::size_t b = a + 1; b < Q.size(); ++b) {
      double m = 0.0;
      for (int j = 0; j <= k; ++j) m = std::max(m, std::abs(orbits[a][j] - orbits[b][j]));
      if (m <= delta) ++bad;
    }
  return bad;
}

}  // namespace

TEST_SUITE("ergodic") {
  TEST_CASE("entropy of z^2 on the unit circle follows the half-angle tree") {
    const auto pm = quad(0.0, 4.0);
    const GridSet X = unit_circle(1024);
    const auto e = entropy_lower_bound(pm, X, 0.05, 12, std::polar(1.0, 0.7));
    CHECK(e.rate >= 0.6);
    CHECK(e.rate <= 0.72);
    CHECK(e.target == doctest::Approx(std::log(2.0)));
    REQUIRE(e.counts.size() == 13);
    for (int j = 0; j <= 12; ++j) CHECK(e.counts[j] == static_cast<std::size_t>(1u << j));
    const auto angles = oracle::doubling_tree_angles(0.7, 12);
    REQUIRE(e.leaves.size() == angles.size());
    for (const double t : angles) {
      const CPoint z = std::polar(1.0, t);
      double best = INFINITY;
      for (const auto& w : e.leaves) best = std::min(best, std::abs(w - z));
      CHECK(best < 1e-9);
    }
  }

  TEST_CASE("entropy of z^2-2 on [-2, 2] matches the Chebyshev tree") {
    const auto pm = quad(-2.0, 3.0);
    const GridSet X = interval(-2.0, 2.0, 1024, 2.2);
    const double x0 = 0.3;
    const auto e = entropy_lower_bound(pm, X, 0.05, 12, x0);
    CHECK(e.rate >= 0.6);
    CHECK(e.rate <= 0.75);
    CHECK(e.counts.back() == oracle::chebyshev_tree_count(std::acos(x0 / 2.0), 12, 0.05));
  }

  TEST_CASE("entropy with k = 0") {
    const auto pm = quad(0.0, 4.0);
    const auto e = entropy_lower_bound(pm, unit_circle(256), 0.05, 0, std::polar(1.0, 0.7));
    CHECK(e.rate == 0.0);
    CHECK(e.counts == std::vector<std::size_t>{1});
  }

  TEST_CASE("tree growth and separation") {
    const auto pm = quad(0.0, 4.0);
    const GridSet X = unit_circle(1024);
    oracle::Gen gen(13);
    for (const double delta : {0.01, 0.03, 0.05}) {
      for (const int k : {4, 8, 12}) {
        const CPoint x0 = std::polar(1.0, gen.uniform(0.0, 2.0 * M_PI));
        const auto e = entropy_lower_bound(pm, X, delta, k, x0);
        CHECK(static_cast<double>(e.counts.back()) >= std::pow(2.0, 0.85 * k));
        CHECK(e.rate <= e.target + 0.05);
        for (std::size_t j = 1; j < e.counts.size(); ++j) CHECK(e.counts[j] >= e.counts[j - 1]);
        if (k <= 8) {
          CHECK(brute_force_violations(pm.map, e.leaves, k, delta) == 0);
          CHECK(separation_violations(pm, e.leaves, k, delta) == 0);
        }
      }
    }
    const auto cheb = quad(-2.0, 3.0);
    const auto e = entropy_lower_bound(cheb, interval(-2.0, 2.0, 1024, 2.2), 0.05, 8, 0.3);
    CHECK(brute_force_violations(cheb.map, e.leaves, 8, 0.05) == 0);
  }

  TEST_CASE("Lyapunov exponents") {
    const auto z2 = quad(0.0, 4.0);
    CHECK(oracle::rel_err(lyapunov_exponent(z2, std::polar(1.0, 1.0), 20), std::log(2.0)) <= 1e-9);
    // Period-2 orbit: (1/2) log 4.
    CHECK(oracle::rel_err(lyapunov_exponent(z2, std::polar(1.0, 2.0 * M_PI / 3.0), 2), std::log(2.0)) <= 1e-12);
    const auto cheb = quad(-2.0, 3.0);
    for (const double z : {0.3, 1.234567}) CHECK(std::abs(lyapunov_exponent(cheb, z, 10000) - std::log(2.0)) < 0.02);
    try {
      lyapunov_exponent(z2, 1.5, 10);
      FAIL("expected OrbitEscaped");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OrbitEscaped);
    }
    try {
      lyapunov_exponent(quad(-1.0, 4.0), 0.0, 10);
      FAIL("expected DerivativeZeroHit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DerivativeZeroHit);
    }
  }

  TEST_CASE("dimension proxy") {
    CHECK(dimension_positivity_proxy(std::log(2.0), std::log(2.0)) == 1.0);
    CHECK(dimension_positivity_proxy(0.6, 0.693) == doctest::Approx(0.6 / 0.693));
    try {
      dimension_positivity_proxy(0.6, 0.0);
      FAIL("expected NonHyperbolicSample");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonHyperbolicSample);
    }
  }

  TEST_CASE("Fekete capacity of the unit disk at n = 64") {
    const auto c = capacity_fekete(unit_disk(1024), 64);
    CHECK(oracle::rel_err(c.value, 1.0) <= 0.03);
    CHECK(c.method == CapacityMethod::Fekete);
    CHECK(c.n_points == 64);
    CHECK_FALSE(c.small_sample);
  }

  TEST_CASE("Fekete capacity of the interval at n = 64") {
    // cap([-2, 2]) = length / 4 = 1.
    const auto c = capacity_fekete(interval(-2.0, 2.0, 1024, 2.2), 64);
    CHECK(oracle::rel_err(c.value, 1.0) <= 0.03);
  }

  TEST_CASE("Fekete capacity at n = 128") {
    CHECK(oracle::rel_err(capacity_fekete(unit_disk(1024), 128).value, 1.0) <= 0.03);
    CHECK(oracle::rel_err(capacity_fekete(interval(-2.0, 2.0, 1024, 2.2), 128).value, 1.0) <= 0.03);
  }

  TEST_CASE("Fekete capacity of two points") {
    GridSet two = GridSet::square(2.0, 32.0 / 15.0, 16);
    two.set(0, 8);
    two.set(15, 8);
    const CPoint a = two.center(0, 8), b = two.center(15, 8);
    CHECK(std::abs(a - b) == doctest::Approx(4.0));
    const auto c = capacity_fekete(two, 2);
    CHECK(c.transfinite == doctest::Approx(4.0));
    CHECK(c.value == doctest::Approx(4.0));
    CHECK(c.small_sample);
    CHECK(c.residual == doctest::Approx(0.0));
    CHECK_THROWS_AS(capacity_fekete(two, 3), Error);
  }

  TEST_CASE("transfinite diameter decreases with n") {
    for (const GridSet& X : {unit_disk(1024), interval(-2.0, 2.0, 1024, 2.2), unit_circle(1024)}) {
      double prev = INFINITY;
      for (const int n : {16, 32, 64, 128}) {
        const auto c = capacity_fekete(X, n);
        CHECK(c.value > 0.0);
        CHECK(c.transfinite <= prev);
        prev = c.transfinite;
      }
    }
  }

  TEST_CASE("Fekete capacity is monotone under inclusion") {
    oracle::Gen gen(19);
    const GridSet shape = GridSet::square(0.0, 2.0, 512);
    for (int t = 0; t < 10; ++t) {
      const double r2 = gen.uniform(0.6, 1.8);
      const double r1 = r2 * gen.uniform(0.2, 0.95);
      const CPoint c1 = gen.in_disk(0.0, r2 - r1);
      const GridSet X2 = rasterize_interior({JordanCurve::circle(0.0, r2, 2048)}, shape);
      GridSet X1 = rasterize_interior({JordanCurve::ellipse(c1, r1, r1 * gen.uniform(0.05, 1.0), 2048)}, shape);
      X1 = X1.intersected(X2);
      if (X1.count() < 200) continue;
      CHECK(capacity_fekete(X1, 64).value <= capacity_fekete(X2, 64).value * 1.03);
    }
  }

  TEST_CASE("Green's function by escape rate") {
    const auto z2 = quad(0.0, 4.0);
    CHECK(oracle::rel_err(green_escape(z2, 2.0), std::log(2.0)) <= 1e-12);
    CHECK(green_escape(z2, 0.5) == 0.0);
    const auto cheb = quad(-2.0, 3.0);
    // Joukowski: z = w + 1/w, G = log|w|.
    CHECK(oracle::rel_err(green_escape(cheb, 3.0), std::log((3.0 + std::sqrt(5.0)) / 2.0)) <= 1e-10);
    CHECK(oracle::rel_err(capacity_green(z2).value, 1.0) <= 0.01);
    CHECK(oracle::rel_err(capacity_green(cheb).value, 1.0) <= 0.01);
    CHECK_THROWS_AS(green_escape(build_proper_map(parse_map("(z^2+1)/z"), Region::disk(0.0, 4.0)), 2.0), Error);
  }

  TEST_CASE("Fekete and Green capacities agree on connected filled Julia sets") {
    for (const CPoint c : {CPoint(0.0), CPoint(-1.0), CPoint(0.24), CPoint(-0.12, 0.75)}) {
      const auto pm = quad(c, 4.0);
      const GridSet K = filled_julia(pm, 1024);
      const double f = capacity_fekete(K, 128).value;
      const double g = capacity_green(pm).value;
      CHECK(f > 0.05);
      CHECK(std::abs(f - g) <= 0.05 * g);
    }
  }
}
