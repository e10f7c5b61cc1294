#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmp/moments.hpp"
#include "qmp/polynomial.hpp"

namespace qmp {

/// Affine map Psi(x, y) = (a + b x + c y, d + e x + f y) with b f - c e != 0.
struct DegreeOneTransform {
  double a = 0.0, b = 1.0, c = 0.0;
  double d = 0.0, e = 0.0, f = 1.0;

  static DegreeOneTransform identity() { return {}; }

  double jacobian() const noexcept { return b * f - c * e; }
  std::pair<double, double> operator()(double x, double y) const noexcept {
    return {a + b * x + c * y, d + e * x + f * y};
  }
  Polynomial first() const { return Polynomial::affine(a, b, c); }
  Polynomial second() const { return Polynomial::affine(d, e, f); }
};

/// Transforms applied to a moment problem, in application order. The working
/// coordinates are Psi_n o ... o Psi_1 of the original ones.
using TransformChain = std::vector<DegreeOneTransform>;

/// beta~_ij = L_beta(Psi_1^i Psi_2^j): the moments of the pushforward under Psi.
MomentSequence transform_moments(const MomentSequence& beta, const DegreeOneTransform& psi);

/// p o Psi
Polynomial compose(const Polynomial& p, const DegreeOneTransform& psi);

/// Matrix of p^ -> (p o Psi)^ on coefficient vectors of degree <= n. Satisfies
/// M~(n) = J^T M(n) J.
Eigen::MatrixXd j_matrix(const DegreeOneTransform& psi, int n);

struct Normalization {
  MomentSequence normalized;  // mass-normalized, M~(1) = identity
  DegreeOneTransform transform;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Degree-one change of variables that turns M(1) of beta / beta_00 into the identity,
/// using the explicit affine coefficients built from the leading principal minors d2, d3.
Normalization normalize(const MomentSequence& beta, double tol = 1e-12);

DegreeOneTransform invert(const DegreeOneTransform& psi);
/// second o first
DegreeOneTransform compose(const DegreeOneTransform& second, const DegreeOneTransform& first);
/// The chain collapsed into a single map (identity for an empty chain).
DegreeOneTransform collapse(const TransformChain& chain);

AtomicMeasure pushforward(const AtomicMeasure& mu, const DegreeOneTransform& psi);
/// Maps working-coordinate atoms back to the original coordinates by applying the
/// inverses in reverse chain order. Weights are unchanged.
AtomicMeasure pullback_measure(const AtomicMeasure& mu, const TransformChain& chain);

}  // namespace qmp
