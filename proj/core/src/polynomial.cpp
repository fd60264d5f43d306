#include "plkit/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace plkit {

Polynomial::Polynomial(std::vector<CPoint> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  for (const auto& v : c_)
    if (!is_finite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite polynomial coefficient");
  trim();
}

Polynomial Polynomial::monomial(int degree, CPoint coeff) {
  std::vector<CPoint> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (c_.size() > 1 && c_.back() == CPoint(0.0)) c_.pop_back();
}

CPoint Polynomial::operator()(CPoint z) const {
  CPoint v = c_.back();
  for (int k = degree() - 1; k >= 0; --k) v = v * z + c_[k];
  return v;
}

void Polynomial::eval2(CPoint z, CPoint& v, CPoint& d1, CPoint& d2) const {
  v = c_.back();
  d1 = 0.0;
  d2 = 0.0;
  for (int k = degree() - 1; k >= 0; --k) {
    d2 = d2 * z + 2.0 * d1;
    d1 = d1 * z + v;
    v = v * z + c_[k];
  }
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial();
  std::vector<CPoint> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(CPoint a) const {
  // Repeated synthetic division by (z - a).
  std::vector<CPoint> c = c_;
  const int n = degree();
  for (int i = 0; i < n; ++i)
    for (int k = n - 1; k >= i; --k) c[k] += a * c[k + 1];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<CPoint> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = (*this)[static_cast<int>(k)] + o[static_cast<int>(k)];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * CPoint(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::vector<CPoint> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(CPoint s) const {
  std::vector<CPoint> r = c_;
  for (auto& v : r) v *= s;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
  Polynomial r = constant(c_.back());
  for (int k = degree() - 1; k >= 0; --k) r = r * inner + constant(c_[k]);
  return r;
}

bool lex_less(CPoint a, CPoint b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

namespace {

CPoint newton_polish(const Polynomial& p, CPoint z) {
  for (int it = 0; it < 50; ++it) {
    CPoint v, d1, d2;
    p.eval2(z, v, d1, d2);
    if (std::abs(d1) == 0.0) break;
    const CPoint step = v / d1;
    const CPoint next = z - step;
    if (!is_finite(next)) break;
    // Reject steps that increase the residual (multiple roots, far seeds).
    if (std::abs(p(next)) > std::abs(v)) break;
    z = next;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

}  // namespace

std::vector<CPoint> polynomial_roots(const Polynomial& p) {
  const int n = p.degree();
  if (p.is_zero()) throw Error(ErrorCode::RootSolveFailure, "zero polynomial has no isolated roots");
  std::vector<CPoint> roots;
  if (n == 0) return roots;
  const CPoint lead = p.leading();
  if (n == 1) {
    roots.push_back(-p[0] / lead);
  } else if (n == 2) {
    const CPoint a = lead, b = p[1], c = p[0];
    const CPoint disc = std::sqrt(b * b - 4.0 * a * c);
    // Numerically stable pairing.
    const CPoint q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
    if (q == CPoint(0.0)) {
      roots = {0.0, 0.0};
    } else {
      roots = {q / a, c / q};
    }
  } else {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) comp(0, k) = -p[n - 1 - k] / lead;
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::RootSolveFailure, "companion eigen solve failed");
    for (int k = 0; k < n; ++k) roots.push_back(solver.eigenvalues()[k]);
  }
  for (auto& r : roots) r = newton_polish(p, r);

  // Merge clusters left by multiple roots.
  double scale = 0.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  const double cluster = 1e-6 * std::max(1.0, scale);
  std::vector<int> group(roots.size(), -1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = static_cast<int>(i);
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (group[j] < 0 && std::abs(roots[j] - roots[i]) < cluster) group[j] = static_cast<int>(i);
  }
  std::vector<CPoint> merged(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (group[i] != static_cast<int>(i)) continue;
    CPoint sum = 0.0;
    int cnt = 0;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (group[j] == static_cast<int>(i)) {
        sum += roots[j];
        ++cnt;
      }
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (group[j] == static_cast<int>(i)) merged[j] = sum / static_cast<double>(cnt);
  }
  std::sort(merged.begin(), merged.end(), lex_less);
  return merged;
}

}  // namespace plkit
