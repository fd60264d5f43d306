#pragma once

#include <vector>

#include "plkit/geometry.hpp"
#include "plkit/maps.hpp"

namespace plkit {

struct EntropyEstimate {
  double delta = 0.0;
  int k = 0;
  std::vector<std::size_t> counts;  // #Q_j, j = 0..k
  double rate = 0.0;                // (1/k) log #Q_k
  double target = 0.0;              // log N
  int degree_on_x = 0;
  std::vector<CPoint> leaves;       // Q_k
};

// Backward tree: P(y) keeps every preimage in the X collar when they are
// pairwise more than delta apart, and a single one otherwise.
EntropyEstimate entropy_lower_bound(const ProperMapDomain& pm, const GridSet& X, double delta, int k, CPoint x0);

// Number of pairs in Q that stay within delta for the first k iterates.
std::size_t separation_violations(const ProperMapDomain& pm, const std::vector<CPoint>& Q, int k, double delta);

double lyapunov_exponent(const ProperMapDomain& pm, CPoint z, int n);

double dimension_positivity_proxy(double h, double chi);

enum class CapacityMethod { Fekete, GreenEscape };
const char* to_string(CapacityMethod m);

struct CapacityEstimate {
  CapacityMethod method = CapacityMethod::Fekete;
  double value = 0.0;
  int n_points = 0;  // Fekete points, or escape-rate terms
  double residual = 0.0;
  // Fekete only: discrete transfinite diameter of the selected points.
  double transfinite = 0.0;
  bool small_sample = false;
};

// Greedy (Leja) points z_1..z_n on the outer boundary cells of X. The value
// is the Chebyshev readout (max over cells of |w_n|)^{1/n} with
// w_n(z) = prod (z - z_i); `transfinite` is the mean pairwise product
// exp(2/(n(n-1)) sum log|z_i - z_j|) and `residual` their relative gap.
CapacityEstimate capacity_fekete(const GridSet& X, int n_points);

// Escape-rate Green's function d^{-n} log|g^n(z)|; 0 for bounded orbits.
double green_escape(const ProperMapDomain& pm, CPoint z, int max_terms = 4096, int* terms_used = nullptr);

// exp(log|z| - G(z)) averaged over `angles` points on |z| = radius.
CapacityEstimate capacity_green(const ProperMapDomain& pm, double radius = 1e3, int angles = 8);

}  // namespace plkit
