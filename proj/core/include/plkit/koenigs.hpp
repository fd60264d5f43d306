#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/maps.hpp"

namespace plkit {

// Germ of a holomorphic map near a fixed point.
class LocalDynamics {
 public:
  virtual ~LocalDynamics() = default;
  virtual CPoint value(CPoint z) const = 0;
  virtual CPoint derivative(CPoint z) const = 0;
  // Coefficients c_0..c_order of g(a + u) - a in powers of u.
  virtual std::vector<CPoint> taylor(CPoint a, int order) const = 0;
  // Preimage of w nearest to `seed`.
  virtual CPoint inverse_near(CPoint w, CPoint seed) const = 0;
};

class MapDynamics : public LocalDynamics {
 public:
  explicit MapDynamics(MapSpec g) : g_(std::move(g)) {}
  CPoint value(CPoint z) const override { return g_.eval(z); }
  CPoint derivative(CPoint z) const override { return g_.deriv(z); }
  std::vector<CPoint> taylor(CPoint a, int order) const override;
  CPoint inverse_near(CPoint w, CPoint seed) const override;

 private:
  MapSpec g_;
};

// z -> alpha z + beta.
class AffineDynamics : public LocalDynamics {
 public:
  AffineDynamics(CPoint alpha, CPoint beta) : alpha_(alpha), beta_(beta) {}
  CPoint value(CPoint z) const override { return alpha_ * z + beta_; }
  CPoint derivative(CPoint) const override { return alpha_; }
  std::vector<CPoint> taylor(CPoint a, int order) const override;
  CPoint inverse_near(CPoint w, CPoint) const override { return (w - beta_) / alpha_; }

 private:
  CPoint alpha_;
  CPoint beta_;
};

class KoenigsChart {
 public:
  CPoint a = 0.0;
  CPoint lambda = 0.0;
  double radius = 0.0;
  std::vector<std::pair<CPoint, CPoint>> samples;
  int n_used = 0;
  int order = 0;
  double tol = 0.0;

  // S(z) = lambda^n h(psi^n(z) - a) with n grown until the value settles.
  CPoint eval(CPoint z, int* n_out = nullptr) const;
  // psi: the inverse branch fixing a.
  CPoint psi(CPoint z) const;
  const LocalDynamics& dynamics() const { return *dyn_; }

 private:
  friend KoenigsChart koenigs_chart(std::shared_ptr<const LocalDynamics>, CPoint, CPoint, double, double, int);
  std::shared_ptr<const LocalDynamics> dyn_;
  std::vector<CPoint> series_;  // h(u) = sum series_[m] u^m
  double series_radius_ = 0.0;
};

KoenigsChart koenigs_chart(std::shared_ptr<const LocalDynamics> dyn, CPoint a, CPoint lambda, double radius,
                           double koe_tol, int order = 24);
KoenigsChart koenigs_chart(const ProperMapDomain& pm, CPoint a, CPoint lambda, double radius);

// max |S(g(z)) - lambda S(z)| over z in the validity disk with g(z) also inside.
double koenigs_residual(const KoenigsChart& chart, int rings = 12, int spokes = 48);

struct GrowthRow {
  CPoint z = 0.0;
  int m = 0;  // inverse steps to reach the validity disk
  int e = 0;  // fundamental-annulus level of psi^m(z)
  CPoint S = 0.0;
  double envelope = 0.0;  // min |S| on the annulus times |lambda|^(m-e)
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
  double annulus_min = 0.0;
  bool envelope_diverges = false;
};

// Extended S along backward orbits; `in_k` rejects points of K.
GrowthTable koenigs_growth_probe(const KoenigsChart& chart, const std::vector<CPoint>& z_seq,
                                 const std::function<bool(CPoint)>& in_k, int max_steps = 200);
GrowthTable koenigs_growth_probe(const KoenigsChart& chart, const std::vector<CPoint>& z_seq, const GridSet& K,
                                 int max_steps = 200);

}  // namespace plkit
