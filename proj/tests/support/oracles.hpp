#pragma once

// Test-side generators and oracles. Nothing here calls into plkit numerics;
// only plain containers are shared so results can be compared.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <numeric>
#include <vector>

namespace oracle {

using C = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// splitmix64
struct Gen {
  std::uint64_t s;
  explicit Gen(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  C in_disk(C c, double r) {
    const double rho = r * std::sqrt(uniform());
    return c + std::polar(rho, uniform(0.0, 2.0 * kPi));
  }
  C in_annulus(C c, double r0, double r1) {
    const double rho = std::sqrt(uniform(r0 * r0, r1 * r1));
    return c + std::polar(rho, uniform(0.0, 2.0 * kPi));
  }
};

inline std::vector<C> circle(C c, double r, int n) {
  std::vector<C> v;
  for (int k = 0; k < n; ++k) v.push_back(c + std::polar(r, 2.0 * kPi * k / n));
  return v;
}

// Winding number by summing turning angles.
inline int winding_by_angles(const std::vector<C>& poly, C z) {
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const C a = poly[i] - z, b = poly[(i + 1) % poly.size()] - z;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// Relative error against a reference value.
inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double seg_point(C p, C a, C b) {
  const C ab = b - a;
  const double t = std::clamp(std::real((p - a) * std::conj(ab)) / std::norm(ab), 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

inline bool segments_cross(C a, C b, C c, C d) {
  auto cross = [](C u, C v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Brute-force minimum distance between two closed polylines.
inline double polyline_distance(const std::vector<C>& p, const std::vector<C>& q) {
  double best = INFINITY;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const C a = p[i], b = p[(i + 1) % p.size()];
    for (std::size_t j = 0; j < q.size(); ++j) {
      const C c = q[j], d = q[(j + 1) % q.size()];
      if (segments_cross(a, b, c, d)) return 0.0;
      best = std::min({best, seg_point(a, c, d), seg_point(b, c, d), seg_point(c, a, b), seg_point(d, a, b)});
    }
  }
  return best;
}

// Complement flood fill on a row-major bitmask (4-connected from the border).
inline std::vector<std::uint8_t> hull(const std::vector<std::uint8_t>& m, int nx, int ny) {
  std::vector<std::uint8_t> outside(m.size(), 0);
  std::deque<int> q;
  auto push = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return;
    const int k = j * nx + i;
    if (m[k] || outside[k]) return;
    outside[k] = 1;
    q.push_back(k);
  };
  for (int i = 0; i < nx; ++i) push(i, 0), push(i, ny - 1);
  for (int j = 0; j < ny; ++j) push(0, j), push(nx - 1, j);
  while (!q.empty()) {
    const int k = q.front();
    q.pop_front();
    const int i = k % nx, j = k / nx;
    push(i - 1, j), push(i + 1, j), push(i, j - 1), push(i, j + 1);
  }
  std::vector<std::uint8_t> h(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) h[k] = outside[k] ? 0 : 1;
  return h;
}

// Escape-time for z^2 + c on the symmetric cell-center lattice of a square
// [cx-hw, cx+hw]^2 with n cells per side.
inline std::vector<std::uint8_t> quadratic_nonescaping(C c, C center, double hw, int n, double escape_r, int horizon) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(n) * n, 0);
  const double cell = 2.0 * hw / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      C z = center + C((i + 0.5 - n / 2.0) * cell, (j + 0.5 - n / 2.0) * cell);
      int t = 0;
      for (; t < horizon && std::abs(z) < escape_r; ++t) z = z * z + c;
      m[static_cast<std::size_t>(j) * n + i] = std::abs(z) < escape_r ? 1 : 0;
    }
  return m;
}

// Durand-Kerner roots of a polynomial with ascending coefficients.
inline std::vector<C> dk_roots(std::vector<C> a) {
  while (a.size() > 1 && std::abs(a.back()) == 0.0) a.pop_back();
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<C> r(n);
  const double rad = 1.0 + [&] {
    double m = 0.0;
    for (int k = 0; k < n; ++k) m = std::max(m, std::abs(a[k] / a[n]));
    return m;
  }();
  for (int k = 0; k < n; ++k) r[k] = std::polar(0.9 * rad, 2.0 * kPi * k / n + 0.4);
  auto eval = [&](C z) {
    C v = a[n];
    for (int k = n - 1; k >= 0; --k) v = v * z + a[k];
    return v / a[n];
  };
  for (int it = 0; it < 5000; ++it) {
    double move = 0.0;
    for (int k = 0; k < n; ++k) {
      C den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != k) den *= r[k] - r[j];
      const C step = eval(r[k]) / den;
      r[k] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-15) break;
  }
  return r;
}

// Coefficients of p(q(z)) for ascending coefficient vectors.
inline std::vector<C> compose(const std::vector<C>& p, const std::vector<C>& q) {
  std::vector<C> out{p.back()};
  for (int k = static_cast<int>(p.size()) - 2; k >= 0; --k) {
    std::vector<C> next(out.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) next[i + j] += out[i] * q[j];
    next[0] += p[k];
    out = std::move(next);
  }
  return out;
}

// Solutions of g^p(z) = z for a polynomial g.
inline std::vector<C> periodic_points(const std::vector<C>& g, int p) {
  std::vector<C> it = g;
  for (int k = 1; k < p; ++k) it = compose(g, it);
  it[1] -= 1.0;
  return dk_roots(it);
}

// Angles of the Q_k tree of z^2 on the unit circle; each level takes the
// two half-angles of every node.
inline std::vector<double> doubling_tree_angles(double theta0, int k) {
  std::vector<double> level{theta0};
  for (int j = 0; j < k; ++j) {
    std::vector<double> next;
    for (double t : level) {
      next.push_back(t / 2.0);
      next.push_back(t / 2.0 + kPi);
    }
    level = std::move(next);
  }
  return level;
}

// z^2-2 tree from 2cos(t): preimages are +-2cos(t/2). Close pairs keep the
// one with the smaller real part.
inline std::size_t chebyshev_tree_count(double t0, int k, double delta) {
  std::vector<double> level{t0};  // angles t with point 2cos(t)
  for (int j = 0; j < k; ++j) {
    std::vector<double> next;
    for (double t : level) {
      const double a = t / 2.0, b = t / 2.0 + kPi;  // 2cos(a) and 2cos(b) = -2cos(a)
      if (std::abs(2.0 * std::cos(a) - 2.0 * std::cos(b)) > delta) {
        next.push_back(a);
        next.push_back(b);
      } else {
        next.push_back(std::cos(a) <= std::cos(b) ? a : b);
      }
    }
    level = std::move(next);
  }
  return level.size();
}

}  // namespace oracle
