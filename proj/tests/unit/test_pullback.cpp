#include <doctest.h>

#include "oracles.hpp"
#include "plkit/formula.hpp"
#include "plkit/pullback.hpp"

using namespace plkit;

namespace {

ProperMapDomain disk_domain(const std::string& f, double r) {
  return build_proper_map(parse_map(f), Region::disk(0.0, r));
}

// Residual of every vertex against the target curve.
double push_forward_residual(const MapSpec& g, const PullbackResult& pb, const JordanCurve& target) {
  double worst = 0.0;
  for (const auto& c : pb.components)
    for (const auto& v : c.vertices()) worst = std::max(worst, distance_to_curve(target, g.eval(v)));
  return worst;
}

}  // namespace

TEST_SUITE("pullback") {
  TEST_CASE("z^2 pulls the circle of radius 4 back to radius 2") {
    const auto pm = disk_domain("z^2", 8.0);
    const auto pb = pullback_curve(pm, JordanCurve::circle(0.0, 4.0, 512));
    REQUIRE(pb.components.size() == 1);
    CHECK(pb.local_degrees == std::vector<int>{2});
    for (const auto& v : pb.components[0].vertices()) CHECK(std::abs(std::abs(v) - 2.0) < 1e-7);
    CHECK(pb.residual < pm.pb_tol());
  }

  TEST_CASE("small circle away from the critical value splits into two") {
    const auto pm = disk_domain("z^2", 8.0);
    const auto pb = pullback_curve(pm, JordanCurve::circle(1.0, 0.01, 256));
    REQUIRE(pb.components.size() == 2);
    CHECK(pb.local_degrees == std::vector<int>{1, 1});
    std::vector<CPoint> centers;
    for (const auto& c : pb.components) centers.push_back(c.centroid());
    std::sort(centers.begin(), centers.end(), lex_less);
    CHECK(std::abs(centers[0] + 1.0) < 0.01);
    CHECK(std::abs(centers[1] - 1.0) < 0.01);
  }

  TEST_CASE("z^2-2 with a large circle") {
    const auto pm = disk_domain("z^2-2", 8.0);
    const auto gamma = JordanCurve::circle(0.0, 6.0, 512);
    const auto pb = pullback_curve(pm, gamma);
    REQUIRE(pb.components.size() == 1);
    CHECK(pb.degree_sum() == 2);
    CHECK(push_forward_residual(pm.map, pb, gamma) < pm.pb_tol());
  }

  TEST_CASE("iterated pullback of z^2 gives radii r^(2^-n)") {
    const auto pm = disk_domain("z^2", 4.0);
    const auto levels = iterate_pullback(pm, JordanCurve::circle(0.0, 2.5, 512), 3);
    REQUIRE(levels.size() == 3);
    for (int n = 1; n <= 3; ++n) {
      const double r = std::pow(2.5, std::pow(2.0, -n));
      for (const auto& v : levels[n - 1].components.at(0).vertices()) CHECK(std::abs(std::abs(v) - r) < 1e-7);
    }
  }

  TEST_CASE("z^2+0.5z peanut contains 0 and -0.5") {
    const auto pm = disk_domain("z^2+0.5z", 4.0);
    const auto levels = iterate_pullback(pm, JordanCurve::circle(0.0, 0.1, 512), 1);
    REQUIRE(levels[0].components.size() == 1);
    const auto& c = levels[0].components[0];
    CHECK(inside(c, 0.0));
    CHECK(inside(c, -0.5));
    CHECK(levels[0].local_degrees == std::vector<int>{2});
  }

  TEST_CASE("z^2-2 lenses are nested") {
    const auto pm = disk_domain("z^2-2", 6.0);
    const auto gamma0 = JordanCurve::circle(0.0, 2.2, 512);
    const auto levels = iterate_pullback(pm, gamma0, 2);
    REQUIRE(levels.size() == 2);
    const auto& l1 = levels[0].components.at(0);
    const auto& l2 = levels[1].components.at(0);
    CHECK(nesting_relation(l2, l1) == Nesting::BInside);
    CHECK(inside(l2, 1.99));
    CHECK(inside(l2, -1.99));
    CHECK_FALSE(inside(l2, CPoint(0.0, 0.5)));
  }

  TEST_CASE("push-forward identity and degree conservation on random circles") {
    oracle::Gen gen(31);
    const char* maps[] = {"z^2", "z^2-1", "z^3-0.5z", "z^2+0.24"};
    for (const char* f : maps) {
      const auto pm = disk_domain(f, 4.0);
      for (int t = 0; t < 6; ++t) {
        const double r = gen.uniform(0.3, 1.2);
        const auto gamma = JordanCurve::circle(gen.in_disk(0.0, 2.0), r, 256);
        if (!pm.in_range(gamma.bbox().lo) || !pm.in_range(gamma.bbox().hi)) continue;
        PullbackResult pb;
        try {
          pb = pullback_curve(pm, gamma);
        } catch (const Error& e) {
          // A critical value within cv_margin of the curve is the only legal refusal.
          CHECK(e.code() == ErrorCode::CriticalValueOnCurve);
          continue;
        }
        CHECK(pb.degree_sum() == pm.degree);
        CHECK(push_forward_residual(pm.map, pb, gamma) < 10.0 * pm.pb_tol() + 1e-9);
        for (const auto& c : pb.components) CHECK(is_simple(c.vertices(), c.geom_eps()));
      }
    }
  }

  TEST_CASE("pullback of the pushed-forward image reproduces the curve") {
    const auto pm = disk_domain("z^2-1", 4.0);
    const auto l1 = iterate_pullback(pm, JordanCurve::circle(0.0, 2.0, 512), 1)[0].components.at(0);
    std::vector<CPoint> image;
    for (const auto& v : l1.vertices()) image.push_back(pm.map.eval(v));
    // The image covers the target twice; order one turn by angle.
    std::sort(image.begin(), image.end(), [](CPoint a, CPoint b) { return std::arg(a) < std::arg(b); });
    std::vector<CPoint> turn;
    for (const auto& w : image)
      if (turn.empty() || std::abs(w - turn.back()) > 1e-6) turn.push_back(w);
    const auto again = pullback_curve(pm, JordanCurve(turn));
    REQUIRE(again.components.size() == 1);
    // Vertices differ, so allow the chord sag of the coarser polyline.
    CHECK(hausdorff_distance(again.components[0], l1) < 1e-3);
  }

  TEST_CASE("monotone nesting of hulls in single mode") {
    const auto pm = disk_domain("z^2+0.24", 4.0);
    const auto levels = iterate_pullback(pm, JordanCurve::circle(0.0, 1.6, 512), 5);
    for (std::size_t n = 1; n < levels.size(); ++n)
      CHECK(nesting_relation(levels[n].components.at(0), levels[n - 1].components.at(0)) == Nesting::BInside);
  }
}
