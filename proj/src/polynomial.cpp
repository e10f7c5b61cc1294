#include "qmp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmp/error.hpp"

namespace qmp {

Monomial monomial_at(std::size_t index) {
  int d = 0;
  while (monomial_count(d) <= index) ++d;
  const int j = static_cast<int>(index - monomial_count(d - 1));
  return {d - j, j};
}

std::vector<Monomial> monomials_up_to(int degree) {
  std::vector<Monomial> out;
  out.reserve(monomial_count(degree));
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j) out.push_back({d - j, j});
  return out;
}

std::string label(Monomial m) {
  if (m.degree() == 0) return "1";
  std::string s;
  auto factor = [&s](char v, int e) {
    if (e == 0) return;
    s += v;
    if (e > 1) s += "^" + std::to_string(e);
  };
  factor('X', m.i);
  factor('Y', m.j);
  return s;
}

std::string exponent_key(Monomial m) { return std::to_string(m.i) + std::to_string(m.j); }

Polynomial::Polynomial(int degree_cap) : cap_(degree_cap), coeffs_(monomial_count(degree_cap), 0.0) {
  if (degree_cap < 0) throw InputError("polynomial degree cap must be nonnegative");
}

Polynomial::Polynomial(int degree_cap, std::vector<double> coefficients)
    : cap_(degree_cap), coeffs_(std::move(coefficients)) {
  if (degree_cap < 0 || coeffs_.size() != monomial_count(degree_cap))
    throw InputError("coefficient count does not match degree cap " + std::to_string(degree_cap));
}

Polynomial Polynomial::constant(double c) {
  Polynomial p(0);
  p.coeffs_[0] = c;
  return p;
}

Polynomial Polynomial::monomial(Monomial m, double c) {
  Polynomial p(m.degree());
  p.coeffs_[monomial_index(m)] = c;
  return p;
}

Polynomial Polynomial::affine(double c0, double cx, double cy) { return Polynomial(1, {c0, cx, cy}); }

int Polynomial::degree() const noexcept {
  for (std::size_t k = coeffs_.size(); k-- > 0;)
    if (coeffs_[k] != 0.0) return monomial_at(k).degree();
  return -1;
}

double Polynomial::coeff(Monomial m) const noexcept {
  if (m.i < 0 || m.j < 0 || m.degree() > cap_) return 0.0;
  return coeffs_[monomial_index(m)];
}

void Polynomial::set(Monomial m, double value) {
  if (m.i < 0 || m.j < 0 || m.degree() > cap_)
    throw InputError("monomial " + label(m) + " exceeds polynomial degree cap");
  coeffs_[monomial_index(m)] = value;
}

double Polynomial::operator()(double x, double y) const noexcept {
  std::vector<double> xp(cap_ + 1, 1.0), yp(cap_ + 1, 1.0);
  for (int k = 1; k <= cap_; ++k) {
    xp[k] = xp[k - 1] * x;
    yp[k] = yp[k - 1] * y;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const Monomial m = monomial_at(k);
    total += coeffs_[k] * xp[m.i] * yp[m.j];
  }
  return total;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r(std::max(cap_, o.cap_));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) r.coeffs_[k] += coeffs_[k];
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) r.coeffs_[k] += o.coeffs_[k];
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(cap_ + o.cap_);
  for (std::size_t p = 0; p < coeffs_.size(); ++p) {
    if (coeffs_[p] == 0.0) continue;
    const Monomial mp = monomial_at(p);
    for (std::size_t q = 0; q < o.coeffs_.size(); ++q) {
      if (o.coeffs_[q] == 0.0) continue;
      r.coeffs_[monomial_index(mp + monomial_at(q))] += coeffs_[p] * o.coeffs_[q];
    }
  }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r = *this;
  for (double& c : r.coeffs_) c *= s;
  return r;
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw InputError("negative polynomial power");
  Polynomial r = constant(1.0);
  for (int k = 0; k < exponent; ++k) r = r * *this;
  return r;
}

Polynomial Polynomial::with_cap(int degree_cap) const {
  Polynomial r(degree_cap);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k < r.coeffs_.size()) {
      r.coeffs_[k] = coeffs_[k];
    } else if (coeffs_[k] != 0.0) {
      throw InputError("polynomial has terms above degree " + std::to_string(degree_cap));
    }
  }
  return r;
}

double Polynomial::max_abs() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace qmp
