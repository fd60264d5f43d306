#include "plkit/koenigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plkit {

std::vector<CPoint> MapDynamics::taylor(CPoint a, int order) const {
  const Polynomial n = g_.numerator().shifted(a);
  const Polynomial d = g_.denominator().shifted(a);
  if (d[0] == CPoint(0.0)) throw Error(ErrorCode::PoleHit, "expansion point is a pole");
  std::vector<CPoint> q(order + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    CPoint acc = n[k];
    for (int j = 1; j <= k; ++j) acc -= d[j] * q[k - j];
    q[k] = acc / d[0];
  }
  q[0] -= a;
  return q;
}

CPoint MapDynamics::inverse_near(CPoint w, CPoint seed) const {
  const auto roots = g_.preimages(w);
  if (roots.empty()) throw Error(ErrorCode::NoConvergence, "no preimage");
  CPoint z = roots.front();
  for (const auto& r : roots)
    if (std::abs(r - seed) < std::abs(z - seed)) z = r;
  for (int k = 0; k < 2; ++k) {
    const CPoint d = g_.deriv(z);
    if (std::abs(d) == 0.0) break;
    z -= (g_.eval(z) - w) / d;
  }
  return z;
}

std::vector<CPoint> AffineDynamics::taylor(CPoint a, int order) const {
  std::vector<CPoint> q(order + 1, 0.0);
  q[0] = alpha_ * a + beta_ - a;
  if (order >= 1) q[1] = alpha_;
  return q;
}

CPoint KoenigsChart::psi(CPoint z) const { return dyn_->inverse_near(z, a + (z - a) / lambda); }

CPoint KoenigsChart::eval(CPoint z, int* n_out) const {
  auto series = [&](CPoint u) {
    CPoint s = 0.0;
    for (int m = static_cast<int>(series_.size()) - 1; m >= 1; --m) s = (s + series_[m]) * u;
    return s;
  };
  CPoint w = z;
  CPoint scale = 1.0;
  int n = 0;
  constexpr int kMaxSteps = 2000;
  while (std::abs(w - a) > series_radius_) {
    if (++n > kMaxSteps) throw Error(ErrorCode::NoConvergence, "inverse branch does not reach the series disk");
    w = psi(w);
    scale *= lambda;
  }
  CPoint s = scale * series(w - a);
  // One more pull-back step must agree within tolerance.
  for (;;) {
    const CPoint w1 = psi(w);
    const CPoint s1 = scale * lambda * series(w1 - a);
    if (std::abs(s1 - s) < tol) break;
    if (++n > kMaxSteps) throw Error(ErrorCode::NoConvergence, "Koenigs approximants do not settle");
    w = w1;
    scale *= lambda;
    s = s1;
  }
  if (n_out) *n_out = n;
  return s;
}

KoenigsChart koenigs_chart(std::shared_ptr<const LocalDynamics> dyn, CPoint a, CPoint lambda, double radius,
                           double koe_tol, int order) {
  if (!(std::abs(lambda) > 1.0) || !(radius > 0.0) || order < 2)
    throw Error(ErrorCode::InvalidArgument, "Koenigs chart needs |lambda| > 1 and a positive radius");
  KoenigsChart chart;
  chart.a = a;
  chart.lambda = lambda;
  chart.radius = radius;
  chart.order = order;
  chart.tol = koe_tol;
  chart.dyn_ = std::move(dyn);

  std::vector<CPoint> g = chart.dyn_->taylor(a, order);
  g[0] = 0.0;
  if (std::abs(g[1] - lambda) > 1e-8 * std::abs(lambda))
    throw Error(ErrorCode::InvalidArgument, "lambda does not match the derivative at the fixed point");
  // h(g(u)) = lambda h(u): h_m (lambda - lambda^m) = sum_{k<m} h_k [u^m] g^k.
  std::vector<std::vector<CPoint>> powers(order + 1);
  powers[1] = g;
  for (int k = 2; k <= order; ++k) {
    powers[k].assign(order + 1, 0.0);
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j) powers[k][i + j] += powers[k - 1][i] * g[j];
  }
  chart.series_.assign(order + 1, 0.0);
  chart.series_[1] = 1.0;
  CPoint lam_m = lambda;
  for (int m = 2; m <= order; ++m) {
    lam_m *= lambda;
    CPoint acc = 0.0;
    for (int k = 1; k < m; ++k) acc += chart.series_[k] * powers[k][m];
    chart.series_[m] = acc / (lambda - lam_m);
  }

  // Disk where the truncated series is accurate to rounding.
  double r = std::numeric_limits<double>::infinity();
  for (int m = order / 2; m <= order; ++m) {
    const double c = std::abs(chart.series_[m]);
    if (c > 0.0) r = std::min(r, 0.5 * std::pow(c, -1.0 / m));
  }
  const double hm = std::abs(chart.series_[order]);
  if (hm > 0.0) r = std::min(r, std::pow(1e-16 / hm, 1.0 / (order - 1)));
  chart.series_radius_ = std::min(r, radius);

  int n_max = 0;
  auto sample = [&](CPoint z) {
    int n = 0;
    chart.samples.emplace_back(z, chart.eval(z, &n));
    n_max = std::max(n_max, n);
  };
  sample(a);
  for (int ring = 1; ring <= 8; ++ring)
    for (int k = 0; k < 24; ++k) sample(a + radius * ring / 8.0 * std::polar(1.0, 2.0 * M_PI * k / 24.0));
  chart.n_used = n_max;
  return chart;
}

KoenigsChart koenigs_chart(const ProperMapDomain& pm, CPoint a, CPoint lambda, double radius) {
  if (!(std::abs(lambda) > 1.0 + pm.tol.mult_tol)) throw Error(ErrorCode::InvalidArgument, "fixed point is not repelling");
  return koenigs_chart(std::make_shared<MapDynamics>(pm.map), a, lambda, radius,
                       pm.tol.koe_tol_rel * std::abs(lambda));
}

double koenigs_residual(const KoenigsChart& chart, int rings, int spokes) {
  double worst = 0.0;
  for (int ring = 0; ring <= rings; ++ring)
    for (int k = 0; k < (ring ? spokes : 1); ++k) {
      const CPoint z = chart.a + chart.radius * ring / rings * std::polar(1.0, 2.0 * M_PI * k / spokes);
      const CPoint s = chart.eval(z);
      const CPoint sg = chart.eval(chart.dynamics().value(z));
      worst = std::max(worst, std::abs(sg - chart.lambda * s));
    }
  return worst;
}

GrowthTable koenigs_growth_probe(const KoenigsChart& chart, const std::vector<CPoint>& z_seq,
                                 const std::function<bool(CPoint)>& in_k, int max_steps) {
  GrowthTable t;
  const double lam = std::abs(chart.lambda);
  // |S| is smallest on the inner boundary psi(dZ) of the annulus Z \ psi(Z).
  t.annulus_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 256; ++k)
    t.annulus_min = std::min(t.annulus_min,
                             std::abs(chart.eval(chart.a + chart.radius * std::polar(1.0, 2.0 * M_PI * k / 256))) / lam);

  for (const CPoint z : z_seq) {
    if (in_k(z)) throw Error(ErrorCode::ExtensionFailed, "probe point lies in K");
    GrowthRow row;
    row.z = z;
    CPoint w = z;
    while (std::abs(w - chart.a) > chart.radius) {
      if (++row.m > max_steps) throw Error(ErrorCode::ExtensionFailed, "backward orbit does not reach the chart");
      w = chart.psi(w);
      if (!is_finite(w)) throw Error(ErrorCode::ExtensionFailed, "backward orbit diverged");
    }
    CPoint y = w;
    while (std::abs(y - chart.a) > 0.0 && std::abs(chart.dynamics().value(y) - chart.a) <= chart.radius &&
           row.e < max_steps) {
      y = chart.dynamics().value(y);
      ++row.e;
    }
    row.S = std::pow(chart.lambda, row.m) * chart.eval(w);
    row.envelope = t.annulus_min * std::pow(lam, row.m - row.e);
    t.rows.push_back(row);
  }
  t.envelope_diverges = t.rows.size() >= 2 && t.rows.back().envelope > t.rows.front().envelope;
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    t.envelope_diverges = t.envelope_diverges && t.rows[k].envelope >= t.rows[k - 1].envelope;
  return t;
}

GrowthTable koenigs_growth_probe(const KoenigsChart& chart, const std::vector<CPoint>& z_seq, const GridSet& K,
                                 int max_steps) {
  return koenigs_growth_probe(chart, z_seq, [&K](CPoint z) { return K.contains(z); }, max_steps);
}

}  // namespace plkit
