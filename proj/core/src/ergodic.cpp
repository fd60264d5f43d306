#include "plkit/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plkit {

EntropyEstimate entropy_lower_bound(const ProperMapDomain& pm, const GridSet& X, double delta, int k, CPoint x0) {
  if (k < 0 || !(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "entropy needs k >= 0 and delta > 0");
  if (X.empty()) throw Error(ErrorCode::EmptyInput, "X is empty");
  EntropyEstimate est;
  est.delta = delta;
  est.k = k;
  est.target = std::log(static_cast<double>(std::max(pm.degree, 1)));
  est.counts.push_back(1);
  std::vector<CPoint> level{x0};

  auto children = [&](CPoint y, int& n_in_x) {
    std::vector<CPoint> pre;
    try {
      pre = pm.map.preimages(y);
    } catch (const Error& e) {
      throw Error(ErrorCode::PreimageSolveFailure, std::string("preimage solve failed: ") + e.what());
    }
    std::vector<CPoint> in;
    for (const auto& z : pre)
      if (X.near(z, 1)) in.push_back(z);
    n_in_x = static_cast<int>(in.size());
    if (in.empty()) throw Error(ErrorCode::PreimageSolveFailure, "no preimage in the X collar");
    std::sort(in.begin(), in.end(), lex_less);
    for (std::size_t i = 0; i < in.size(); ++i)
      for (std::size_t j = i + 1; j < in.size(); ++j)
        if (std::abs(in[i] - in[j]) <= delta) return std::vector<CPoint>{in.front()};
    return in;
  };

  for (int j = 0; j < k; ++j) {
    std::vector<std::vector<CPoint>> kids(level.size());
    std::vector<int> n_in(level.size(), 0);
    bool failed = false;
    Error failure(ErrorCode::PreimageSolveFailure, "");
#pragma omp parallel for schedule(dynamic, 16)
    for (long s = 0; s < static_cast<long>(level.size()); ++s) {
      try {
        kids[s] = children(level[s], n_in[s]);
      } catch (const Error& e) {
#pragma omp critical
        {
          if (!failed) failure = e;
          failed = true;
        }
      }
    }
    if (failed) throw failure;
    if (j == 0) est.degree_on_x = n_in[0];
    std::vector<CPoint> next;
    for (const auto& v : kids) next.insert(next.end(), v.begin(), v.end());
    level = std::move(next);
    est.counts.push_back(level.size());
  }
  est.rate = k == 0 ? 0.0 : std::log(static_cast<double>(level.size())) / k;
  est.leaves = std::move(level);
  return est;
}

std::size_t separation_violations(const ProperMapDomain& pm, const std::vector<CPoint>& Q, int k, double delta) {
  const std::size_t n = Q.size();
  const int steps = std::max(k, 1);
  std::vector<std::vector<CPoint>> orbit(n);
  for (std::size_t i = 0; i < n; ++i) {
    CPoint z = Q[i];
    for (int t = 0; t < steps; ++t) {
      orbit[i].push_back(z);
      z = pm.map.eval(z);
    }
  }
  std::size_t bad = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : bad)
  for (long i = 0; i < static_cast<long>(n); ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double spread = 0.0;
      for (int t = 0; t < steps; ++t) spread = std::max(spread, std::abs(orbit[i][t] - orbit[j][t]));
      if (!(spread > delta)) ++bad;
    }
  return bad;
}

double lyapunov_exponent(const ProperMapDomain& pm, CPoint z, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lyapunov needs n >= 1");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!pm.in_domain(z)) throw Error(ErrorCode::OrbitEscaped, "orbit left the domain at step " + std::to_string(i));
    const double d = std::abs(pm.map.deriv(z));
    if (d < 1e-14) throw Error(ErrorCode::DerivativeZeroHit, "orbit hit a critical point at step " + std::to_string(i));
    sum += std::log(d);
    z = pm.map.eval(z);
  }
  return sum / n;
}

double dimension_positivity_proxy(double h, double chi) {
  if (!(chi > 0.0)) throw Error(ErrorCode::NonHyperbolicSample, "Lyapunov exponent is not positive");
  return h / chi;
}

const char* to_string(CapacityMethod m) { return m == CapacityMethod::Fekete ? "FEKETE" : "GREEN_ESCAPE"; }

CapacityEstimate capacity_fekete(const GridSet& X, int n_points) {
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "Fekete selection needs at least 2 points");
  if (X.empty()) throw Error(ErrorCode::EmptyInput, "X is empty");
  if (X.count() < static_cast<std::size_t>(n_points))
    throw Error(ErrorCode::TooFewCells, "X has fewer cells than requested points");

  // Candidates: outer boundary cells of the hull, where |w_n| attains its max.
  const GridSet hull = topological_hull(X);
  std::vector<CPoint> cand;
  for (int j = 0; j < hull.ny(); ++j)
    for (int i = 0; i < hull.nx(); ++i) {
      if (!hull.test(i, j)) continue;
      const bool edge = i == 0 || j == 0 || i + 1 == hull.nx() || j + 1 == hull.ny() || !hull.test(i - 1, j) ||
                        !hull.test(i + 1, j) || !hull.test(i, j - 1) || !hull.test(i, j + 1);
      if (edge) cand.push_back(hull.center(i, j));
    }
  std::sort(cand.begin(), cand.end(), lex_less);
  if (cand.size() < static_cast<std::size_t>(n_points) + 1) {
    // Tiny sets: every cell is a candidate.
    cand.clear();
    for (const auto idx : X.occupied()) cand.push_back(X.center(idx));
    std::sort(cand.begin(), cand.end(), lex_less);
  }
  const std::size_t m = cand.size();
  const double ninf = -std::numeric_limits<double>::infinity();

  // Arg-max with lexicographic tie-break (candidates are lex sorted).
  auto argmax = [&](const std::vector<double>& score) {
    long best = -1;
    double bv = ninf;
#pragma omp parallel
    {
      long lb = -1;
      double lv = ninf;
#pragma omp for nowait
      for (long c = 0; c < static_cast<long>(m); ++c)
        if (score[c] > lv) {
          lv = score[c];
          lb = c;
        }
#pragma omp critical
      if (lb >= 0 && (lv > bv || (lv == bv && lb < best))) {
        bv = lv;
        best = lb;
      }
    }
    return std::make_pair(best, bv);
  };

  CPoint centroid = 0.0;
  for (const auto& c : cand) centroid += c;
  centroid /= static_cast<double>(m);
  std::vector<double> score(m);
  for (std::size_t c = 0; c < m; ++c) score[c] = std::abs(cand[c] - centroid);
  std::vector<CPoint> pts{cand[argmax(score).first]};
  std::vector<double> logprod(m, 0.0);
  double readout_log = 0.0;
  for (int s = 1; s <= n_points; ++s) {
    const CPoint z = pts.back();
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(m); ++c) {
      if (logprod[c] == ninf) continue;
      const double d = std::abs(cand[c] - z);
      logprod[c] = d > 0.0 ? logprod[c] + std::log(d) : ninf;
    }
    const auto [best, val] = argmax(logprod);
    if (s == n_points) {
      readout_log = best >= 0 ? val / n_points : ninf;
      break;
    }
    pts.push_back(cand[best]);
  }

  double pair_log = 0.0;
  for (int i = 0; i < n_points; ++i)
    for (int j = i + 1; j < n_points; ++j) pair_log += std::log(std::abs(pts[i] - pts[j]));
  CapacityEstimate est;
  est.method = CapacityMethod::Fekete;
  est.n_points = n_points;
  est.transfinite = std::exp(2.0 * pair_log / (static_cast<double>(n_points) * (n_points - 1)));
  est.small_sample = n_points < 16;
  // With no cell left to read the Chebyshev norm from, fall back to the
  // transfinite diameter itself.
  est.value = readout_log == ninf ? est.transfinite : std::exp(readout_log);
  est.residual = (est.transfinite - est.value) / est.value;
  return est;
}

double green_escape(const ProperMapDomain& pm, CPoint z, int max_terms, int* terms_used) {
  const MapSpec& g = pm.map;
  if (!g.is_polynomial() || g.algebraic_degree() < 2)
    throw Error(ErrorCode::InvalidArgument, "escape-rate Green's function needs a polynomial of degree >= 2");
  const Polynomial& p = g.numerator();
  const int d = p.degree();
  const double lead = std::abs(p[d] / g.denominator()[0]);
  double tail = 0.0;
  for (int k = 0; k < d; ++k) tail += std::abs(p[k] / g.denominator()[0]);
  // Beyond this radius |g(w)| >= 2|w|.
  const double r_esc = std::max(1.0, (2.0 + tail) / lead);

  CPoint w = z;
  double scale = 1.0;
  double G = 0.0;
  bool escaping = false;
  int n = 0;
  for (n = 1; n <= max_terms; ++n) {
    w = g.eval(w);
    scale /= d;
    const double a = std::abs(w);
    if (!std::isfinite(a)) break;
    const double Gn = scale * std::log(std::max(a, 1.0));
    if (a > r_esc) {
      const bool settled = escaping && std::abs(Gn - G) < 1e-10;
      escaping = true;
      G = Gn;
      if (settled || a > 1e100) break;
    }
  }
  if (terms_used) *terms_used = std::min(n, max_terms);
  return escaping ? G : 0.0;
}

CapacityEstimate capacity_green(const ProperMapDomain& pm, double radius, int angles) {
  if (!(radius > 0.0) || angles < 1) throw Error(ErrorCode::InvalidArgument, "bad radius or angle count");
  std::vector<double> c(angles);
  int terms = 0;
  for (int k = 0; k < angles; ++k) {
    const CPoint z = std::polar(radius, 2.0 * M_PI * k / angles + 0.1);
    int used = 0;
    c[k] = std::log(radius) - green_escape(pm, z, 4096, &used);
    terms = std::max(terms, used);
  }
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= angles;
  double spread = 0.0;
  for (double v : c) spread = std::max(spread, std::abs(v - mean));
  CapacityEstimate est;
  est.method = CapacityMethod::GreenEscape;
  est.value = std::exp(mean);
  est.n_points = terms;
  est.residual = spread;
  return est;
}

}  // namespace plkit
