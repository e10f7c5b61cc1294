#include "qmp/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "qmp/error.hpp"

namespace qmp {

namespace {

void require_invertible(const DegreeOneTransform& psi) {
  const double scale = std::max({std::abs(psi.b * psi.f), std::abs(psi.c * psi.e), 1e-300});
  if (!(std::abs(psi.jacobian()) > 1e-14 * scale))
    throw InputError("degree-one transform has singular linear part (bf - ce = 0)");
}

// powers[i][j] = Psi_1^i Psi_2^j for i + j <= degree
std::vector<std::vector<Polynomial>> power_table(const DegreeOneTransform& psi, int degree) {
  const Polynomial p1 = psi.first();
  const Polynomial p2 = psi.second();
  std::vector<Polynomial> pow1(degree + 1), pow2(degree + 1);
  pow1[0] = pow2[0] = Polynomial::constant(1.0);
  for (int k = 1; k <= degree; ++k) {
    pow1[k] = pow1[k - 1] * p1;
    pow2[k] = pow2[k - 1] * p2;
  }
  std::vector<std::vector<Polynomial>> table(degree + 1);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) table[i].push_back(pow1[i] * pow2[j]);
  return table;
}

}  // namespace

MomentSequence transform_moments(const MomentSequence& beta, const DegreeOneTransform& psi) {
  const auto table = power_table(psi, beta.degree());
  MomentSequence out(beta.degree());
  for (const Monomial m : monomials_up_to(beta.degree())) out.set(m, riesz(beta, table[m.i][m.j]));
  return out;
}

Polynomial compose(const Polynomial& p, const DegreeOneTransform& psi) {
  const auto table = power_table(psi, p.degree_cap());
  Polynomial out(p.degree_cap());
  for (const Monomial m : monomials_up_to(p.degree_cap())) {
    const double c = p.coeff(m);
    if (c != 0.0) out = out + table[m.i][m.j].with_cap(p.degree_cap()) * c;
  }
  return out;
}

Eigen::MatrixXd j_matrix(const DegreeOneTransform& psi, int n) {
  if (n < 0) throw InputError("j_matrix order must be nonnegative");
  require_invertible(psi);
  const auto table = power_table(psi, n);
  const auto size = static_cast<Eigen::Index>(monomial_count(n));
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(size, size);
  const auto labels = monomials_up_to(n);
  for (Eigen::Index col = 0; col < size; ++col) {
    const Polynomial& p = table[labels[col].i][labels[col].j];
    for (Eigen::Index row = 0; row < size; ++row) j(row, col) = p.coeff(labels[row]);
  }
  return j;
}

Normalization normalize(const MomentSequence& beta, double tol) {
  if (beta.degree() < 2) throw InputError("normalization needs moments up to degree 2");
  const double mass = beta.get(0, 0);
  if (!(mass > 0.0)) throw NotPositiveDefiniteError("beta_00 must be positive");
  const MomentSequence unit = beta.scaled(1.0 / mass);
  const double b10 = unit.get(1, 0), b01 = unit.get(0, 1);
  const double b20 = unit.get(2, 0), b11 = unit.get(1, 1), b02 = unit.get(0, 2);

  Normalization n;
  n.d2 = b20 - b10 * b10;
  n.d3 = -b02 * b10 * b10 + 2 * b01 * b10 * b11 - b11 * b11 - b01 * b01 * b20 + b02 * b20;
  if (!(n.d2 > tol) || !(n.d3 > tol))
    throw NotPositiveDefiniteError("M(1) is not positive definite (d2 = " + std::to_string(n.d2) +
                                   ", d3 = " + std::to_string(n.d3) + ")");
  const double root = std::sqrt(n.d2 * n.d3);
  DegreeOneTransform& psi = n.transform;
  psi.a = (b01 * b20 - b10 * b11) / root;
  psi.b = (b11 - b01 * b10) / root;
  psi.c = -std::sqrt(n.d2 / n.d3);
  psi.d = -b10 / std::sqrt(n.d2);
  psi.e = 1.0 / std::sqrt(n.d2);
  psi.f = 0.0;
  n.normalized = transform_moments(unit, psi);
  return n;
}

DegreeOneTransform invert(const DegreeOneTransform& psi) {
  require_invertible(psi);
  const double det = psi.jacobian();
  DegreeOneTransform inv;
  inv.b = psi.f / det;
  inv.c = -psi.c / det;
  inv.e = -psi.e / det;
  inv.f = psi.b / det;
  inv.a = -(inv.b * psi.a + inv.c * psi.d);
  inv.d = -(inv.e * psi.a + inv.f * psi.d);
  return inv;
}

DegreeOneTransform compose(const DegreeOneTransform& second, const DegreeOneTransform& first) {
  require_invertible(second);
  require_invertible(first);
  DegreeOneTransform r;
  r.a = second.a + second.b * first.a + second.c * first.d;
  r.b = second.b * first.b + second.c * first.e;
  r.c = second.b * first.c + second.c * first.f;
  r.d = second.d + second.e * first.a + second.f * first.d;
  r.e = second.e * first.b + second.f * first.e;
  r.f = second.e * first.c + second.f * first.f;
  return r;
}

DegreeOneTransform collapse(const TransformChain& chain) {
  DegreeOneTransform total = DegreeOneTransform::identity();
  for (const auto& psi : chain) total = compose(psi, total);
  return total;
}

AtomicMeasure pushforward(const AtomicMeasure& mu, const DegreeOneTransform& psi) {
  AtomicMeasure out = mu;
  for (Atom& a : out.atoms) std::tie(a.x, a.y) = psi(a.x, a.y);
  return out;
}

AtomicMeasure pullback_measure(const AtomicMeasure& mu, const TransformChain& chain) {
  AtomicMeasure out = mu;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) out = pushforward(out, invert(*it));
  return out;
}

}  // namespace qmp
