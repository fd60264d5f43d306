#include <doctest.h>

#include "oracles.hpp"
#include "plkit/formula.hpp"
#include "plkit/koenigs.hpp"

using namespace plkit;

namespace {

ProperMapDomain disk_domain(const std::string& f, double r) {
  return build_proper_map(parse_map(f), Region::disk(0.0, r));
}

}  // namespace

TEST_SUITE("koenigs") {
  TEST_CASE("z^2 at 1 is conjugate to log") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto chart = koenigs_chart(pm, 1.0, 2.0, 0.2);
    CHECK(std::abs(chart.eval(1.0)) == 0.0);
    oracle::Gen gen(7);
    for (int t = 0; t < 200; ++t) {
      const CPoint z = gen.in_disk(1.0, 0.2);
      CHECK(std::abs(chart.eval(z) - std::log(z)) < 1e-6);
    }
    for (const auto& [z, s] : chart.samples) CHECK(std::abs(s - std::log(z)) < 1e-6);
    // S'(1) = 1.
    const double h = 1e-6;
    CHECK(std::abs((chart.eval(1.0 + h) - chart.eval(1.0 - h)) / (2.0 * h) - 1.0) < 1e-6);
  }

  TEST_CASE("functional equation for z^2-0.5") {
    const auto pm = disk_domain("z^2-0.5", 4.0);
    const double a = (1.0 + std::sqrt(3.0)) / 2.0;
    const auto chart = koenigs_chart(pm, a, 2.0 * a, 0.2);
    CHECK(koenigs_residual(chart) < 1e-8 * 2.0 * a);
    CHECK(std::abs(chart.eval(a)) < 1e-14);
  }

  TEST_CASE("functional equation on random repelling fixed points") {
    oracle::Gen gen(29);
    for (int t = 0; t < 6; ++t) {
      const CPoint c = gen.in_disk(0.0, 0.6);
      const auto pm = build_proper_map(MapSpec::polynomial({c, 0.0, 1.0}), Region::disk(0.0, 4.0));
      // Fixed points (1 +- sqrt(1 - 4c)) / 2; take the one with larger |2z|.
      const CPoint s = std::sqrt(1.0 - 4.0 * c);
      CPoint a = (1.0 + s) / 2.0;
      if (std::abs((1.0 - s) / 2.0) > std::abs(a)) a = (1.0 - s) / 2.0;
      const CPoint lambda = 2.0 * a;
      if (std::abs(lambda) < 1.2) continue;
      const auto chart = koenigs_chart(pm, a, lambda, 0.1);
      CHECK(koenigs_residual(chart) < 1e-8 * std::abs(lambda));
    }
  }

  TEST_CASE("charts need a repelling multiplier") {
    const auto pm = disk_domain("z^2-0.5", 4.0);
    const double a = (1.0 - std::sqrt(3.0)) / 2.0;
    CHECK_THROWS_AS(koenigs_chart(pm, a, 2.0 * a, 0.1), Error);
  }

  TEST_CASE("growth probe refuses points of K") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto chart = koenigs_chart(pm, 1.0, 2.0, 0.2);
    std::vector<CPoint> zs;
    for (int k = 2; k < 8; ++k) zs.push_back(std::polar(1.0, 2.0 * M_PI * (0.5 - std::pow(2.0, -k))));
    try {
      koenigs_growth_probe(chart, zs, [](CPoint w) { return std::abs(w) <= 1.0 + 1e-9; });
      FAIL("expected ExtensionFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ExtensionFailed);
    }
  }

  TEST_CASE("growth probe on a linear model doubles per level") {
    const auto chart = koenigs_chart(std::make_shared<AffineDynamics>(2.0, 0.0), 0.0, 2.0, 0.01, 1e-8);
    std::vector<CPoint> zs;
    for (int k = 0; k < 7; ++k) zs.push_back(0.009 * std::pow(2.0, k));
    const auto table = koenigs_growth_probe(chart, zs, [](CPoint w) { return std::abs(w) >= 1.0; });
    REQUIRE(table.rows.size() == zs.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
      CHECK(std::abs(std::abs(table.rows[k].S) - std::abs(zs[k])) < 1e-12);
      CHECK(table.rows[k].m == static_cast<int>(k));
    }
    for (std::size_t k = 1; k < zs.size(); ++k)
      CHECK(oracle::rel_err(std::abs(table.rows[k].S) / std::abs(table.rows[k - 1].S), 2.0) <= 1e-12);
    CHECK(table.envelope_diverges);
  }

  TEST_CASE("growth probe on an affine model with multiplier 3") {
    const auto chart = koenigs_chart(std::make_shared<AffineDynamics>(3.0, -1.0), 0.5, 3.0, 0.01, 1e-8);
    std::vector<CPoint> zs;
    for (int k = 0; k < 6; ++k) zs.push_back(0.5 + 0.009 * std::pow(3.0, k));
    const auto table = koenigs_growth_probe(chart, zs, [](CPoint) { return false; });
    REQUIRE(table.rows.size() == zs.size());
    for (std::size_t k = 1; k < table.rows.size(); ++k)
      CHECK(oracle::rel_err(table.rows[k].envelope / table.rows[k - 1].envelope, 3.0) <= 0.05);
  }
}
