#pragma once

#include <span>
#include <vector>

#include "qmp/monomial.hpp"

namespace qmp {

/// Dense bivariate polynomial with coefficients stored in graded lexicographic order
/// up to a degree cap. Products grow the cap; no truncation happens implicitly.
class Polynomial {
 public:
  Polynomial() : Polynomial(0) {}
  explicit Polynomial(int degree_cap);
  Polynomial(int degree_cap, std::vector<double> coefficients);

  static Polynomial constant(double c);
  static Polynomial monomial(Monomial m, double c = 1.0);
  /// c0 + cx*x + cy*y
  static Polynomial affine(double c0, double cx, double cy);

  int degree_cap() const noexcept { return cap_; }
  /// Highest degree carrying a nonzero coefficient; -1 for the zero polynomial.
  int degree() const noexcept;

  double coeff(Monomial m) const noexcept;
  void set(Monomial m, double value);
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  double operator()(double x, double y) const noexcept;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial pow(int exponent) const;

  /// Copy with the degree cap changed; coefficients above the new cap must be zero.
  Polynomial with_cap(int degree_cap) const;

  /// Largest absolute coefficient.
  double max_abs() const noexcept;

 private:
  int cap_;
  std::vector<double> coeffs_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

}  // namespace qmp
