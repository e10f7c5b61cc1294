#include "qmp/atoms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qmp/error.hpp"

namespace qmp {

namespace {

std::vector<Eigen::Index> indices_of(const std::vector<Monomial>& basis) {
  std::vector<Eigen::Index> idx;
  idx.reserve(basis.size());
  for (const Monomial m : basis) idx.push_back(static_cast<Eigen::Index>(monomial_index(m)));
  return idx;
}

// Fixed multipliers for N(t); none is a small rational, so ties in x + t y are unlikely.
constexpr std::array<double, 8> kMixing = {0.6180339887498949, -0.4142135623730951, 0.7320508075688772,
                                           -0.2360679774997897, 0.4494897427831781, -0.6457513110645906,
                                           0.3166247903554,     -0.8284271247461903};

}  // namespace

double MultiplicationPair::commutator() const {
  const double denom = std::max(mx.norm() * my.norm(), 1e-300);
  return (mx * my - my * mx).norm() / denom;
}

MultiplicationPair multiplication_matrices(const MomentMatrix& m3, const std::vector<Monomial>& basis,
                                           double rank_tol) {
  if (basis.empty()) throw PreconditionError("multiplication basis is empty");
  for (const Monomial m : basis)
    if (m.degree() > m3.order - 1)
      throw PreconditionError("basis monomial " + label(m) + " has no room for multiplication");
  const auto idx = indices_of(basis);
  const Eigen::MatrixXd gram = m3.entries(idx, idx);
  const SpectralSummary s = psd_rank(gram, rank_tol);
  if (s.rank != static_cast<int>(basis.size()) || !s.is_psd)
    throw PreconditionError("basis columns of M(3) are linearly dependent");
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);

  MultiplicationPair pair;
  pair.basis = basis;
  const auto r = static_cast<Eigen::Index>(basis.size());
  pair.mx.resize(r, r);
  pair.my.resize(r, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto xi = static_cast<Eigen::Index>(monomial_index(basis[k] + Monomial{1, 0}));
    const auto yi = static_cast<Eigen::Index>(monomial_index(basis[k] + Monomial{0, 1}));
    pair.mx.col(k) = ldlt.solve(m3.entries(idx, xi));
    pair.my.col(k) = ldlt.solve(m3.entries(idx, yi));
  }
  return pair;
}

std::vector<Point> extract_atoms(const MultiplicationPair& pair, double tol) {
  const auto r = pair.mx.rows();
  const auto one = std::find(pair.basis.begin(), pair.basis.end(), Monomial{0, 0});
  const Eigen::Index one_at = one == pair.basis.end() ? -1 : one - pair.basis.begin();
  const double sx = std::max(pair.mx.norm(), 1e-300);
  const double sy = pair.my.norm();

  for (const double t0 : kMixing) {
    const double t = sy > 0 ? t0 * sx / sy : t0;
    const Eigen::MatrixXd n = pair.mx.transpose() + t * pair.my.transpose();
    const Eigen::EigenSolver<Eigen::MatrixXd> es(n);
    if (es.info() != Eigen::Success) continue;
    const Eigen::VectorXcd lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    if (lam.imag().cwiseAbs().maxCoeff() > tol * scale)
      throw NumericalFailure("multiplication matrices have a complex spectrum");

    const Eigen::VectorXd lam_re = lam.real();
    std::vector<double> re(lam_re.data(), lam_re.data() + r);
    std::sort(re.begin(), re.end());
    bool simple = true;
    for (std::size_t k = 1; k < re.size(); ++k) simple = simple && (re[k] - re[k - 1]) > 1e-8 * scale;
    if (!simple) continue;

    std::vector<Point> points;
    const Eigen::MatrixXd vecs = es.eigenvectors().real();
    for (Eigen::Index k = 0; k < r; ++k) {
      Eigen::VectorXd v = vecs.col(k);
      if (one_at >= 0) {
        if (!(std::abs(v(one_at)) > 1e-12 * v.cwiseAbs().maxCoeff()))
          throw NumericalFailure("eigenvector vanishes on the monomial 1; not an evaluation vector");
        v /= v(one_at);
      }
      const double vv = v.squaredNorm();
      Point p{v.dot(pair.mx.transpose() * v) / vv, v.dot(pair.my.transpose() * v) / vv};
      if (one_at >= 0) {
        const double vmax = std::max(1.0, v.cwiseAbs().maxCoeff());
        for (std::size_t b = 0; b < pair.basis.size(); ++b) {
          const Monomial m = pair.basis[b];
          const double expect = std::pow(p.x, m.i) * std::pow(p.y, m.j);
          if (std::abs(v(static_cast<Eigen::Index>(b)) - expect) > 1e-6 * vmax)
            throw NumericalFailure("eigenvector is not the evaluation vector of " + label(m) +
                                    " at an atom");
        }
      }
      points.push_back(p);
    }
    double spread = 1.0;
    for (const Point& p : points) spread = std::max({spread, std::abs(p.x), std::abs(p.y)});
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (std::hypot(points[i].x - points[j].x, points[i].y - points[j].y) < tol * spread)
          throw NumericalFailure("two atoms coincide; the extension is not flat");
    return points;
  }
  throw NumericalFailure("no mixing parameter separates the spectrum of the multiplication pair");
}

std::vector<double> solve_weights(std::span<const Point> points, const MomentSequence& beta,
                                  const std::vector<Monomial>& basis, double weight_tol) {
  if (points.size() != basis.size())
    throw PreconditionError("solve_weights needs as many points as basis monomials");
  const auto r = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd v(r, r);
  Eigen::VectorXd rhs(r);
  for (Eigen::Index row = 0; row < r; ++row) {
    const Monomial m = basis[row];
    rhs(row) = beta[m];
    for (Eigen::Index k = 0; k < r; ++k)
      v(row, k) = std::pow(points[k].x, m.i) * std::pow(points[k].y, m.j);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto sv = svd.singularValues();
  if (!(sv(r - 1) > 0.0) || sv(0) / sv(r - 1) > 1e12)
    throw NumericalFailure("Vandermonde system for the weights is ill-conditioned");
  const Eigen::VectorXd w = v.colPivHouseholderQr().solve(rhs);
  const double floor = weight_tol * std::abs(beta.get(0, 0));
  for (Eigen::Index k = 0; k < r; ++k)
    if (!(w(k) > floor))
      throw NumericalFailure("atom weight " + format_number(w(k)) + " is not positive");
  return {w.data(), w.data() + r};
}

std::vector<Monomial> quadratic_basis(std::optional<Monomial> pivot) {
  std::vector<Monomial> basis;
  for (const Monomial m : monomials_up_to(2))
    if (!pivot || m != *pivot) basis.push_back(m);
  return basis;
}

AtomicMeasure recover_measure(const FlatExtension& ext, const std::vector<Monomial>& basis,
                              const Tolerances& tol) {
  const MultiplicationPair pair = multiplication_matrices(ext.m3, basis, tol.rank);
  const std::vector<Point> points = extract_atoms(pair);
  const std::vector<double> w = solve_weights(points, ext.moments, basis, tol.weight);
  AtomicMeasure mu;
  for (std::size_t k = 0; k < points.size(); ++k) mu.atoms.push_back({points[k].x, points[k].y, w[k]});
  return mu;
}

}  // namespace qmp
