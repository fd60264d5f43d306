#pragma once

#include <vector>

#include "plkit/types.hpp"

namespace plkit {

// Dense complex polynomial, coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() : c_{CPoint(0.0)} {}
  explicit Polynomial(std::vector<CPoint> coeffs);
  static Polynomial constant(CPoint v) { return Polynomial({v}); }
  static Polynomial monomial(int degree, CPoint coeff = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<CPoint>& coeffs() const { return c_; }
  CPoint operator[](int k) const { return k <= degree() ? c_[k] : CPoint(0.0); }
  CPoint leading() const { return c_.back(); }
  bool is_zero() const { return c_.size() == 1 && c_[0] == CPoint(0.0); }

  CPoint operator()(CPoint z) const;
  // Value and first two derivatives by Horner.
  void eval2(CPoint z, CPoint& v, CPoint& d1, CPoint& d2) const;
  Polynomial derivative() const;
  // Coefficients of p(a + u) in powers of u.
  Polynomial shifted(CPoint a) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(CPoint s) const;
  Polynomial compose(const Polynomial& inner) const;
  bool operator==(const Polynomial& o) const { return c_ == o.c_; }

 private:
  std::vector<CPoint> c_;
  void trim();
};

// All roots with multiplicity: companion-matrix eigenvalues polished by Newton.
// Roots closer than the cluster radius are replaced by their mean.
std::vector<CPoint> polynomial_roots(const Polynomial& p);

// Lexicographic (re, im) order used for deterministic output.
bool lex_less(CPoint a, CPoint b);

}  // namespace plkit
