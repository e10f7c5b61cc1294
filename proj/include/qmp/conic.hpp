#pragma once

#include <array>
#include <string_view>

#include "qmp/moments.hpp"
#include "qmp/options.hpp"
#include "qmp/polynomial.hpp"
#include "qmp/transforms.hpp"

namespace qmp {

/// Coefficients (p00, p10, p01, p20, p11, p02) of p with p(X, Y) = 0 in the column space.
/// Stored with unit Euclidean norm and first nonzero coefficient positive.
struct ConicRelation {
  std::array<double, 6> coefficients{};
  /// ||M^ * coefficients|| for relations read off a matrix, 0 otherwise.
  double residual = 0.0;

  static ConicRelation from_coefficients(const std::array<double, 6>& raw);
  Polynomial polynomial() const;
  double operator()(double x, double y) const;
};

enum class ConicType { Parabola, NondegenerateHyperbola, IntersectingLines, EllipseOrCircle, OtherDegenerate };

/// Y = X^2, XY = 1, XY = 0, X^2 + Y^2 = 1.
enum class CanonicalForm { Parabola, Hyperbola, Lines, Circle, None };

struct ConicClass {
  ConicType type = ConicType::OtherDegenerate;
  CanonicalForm target = CanonicalForm::None;
  /// p20 p02 - p11^2 / 4
  double delta = 0.0;
  /// Determinant of the symmetric 3x3 conic matrix.
  double delta3 = 0.0;
};

std::string_view to_string(ConicType t);
std::string_view to_string(CanonicalForm f);
CanonicalForm canonical_target(ConicType t);
/// Zero polynomial of the canonical form, with coefficients scaled as written (e.g. xy - 1).
Polynomial canonical_polynomial(CanonicalForm f);

/// Null vector of a PSD rank-5 M^(2), normalized.
ConicRelation column_relation(const MomentMatrix& reduced, double rank_tol);

/// Degeneracy decisions compare delta to tol * ||p||^2 and delta3 to tol * ||p||^3.
ConicClass classify(const ConicRelation& p, double tol = 1e-9);

struct Canonicalization {
  DegreeOneTransform transform;  // original -> canonical coordinates
  CanonicalForm target = CanonicalForm::None;
  /// p o Psi^-1 = factor * canonical_polynomial(target) up to `residual`.
  double factor = 0.0;
  /// Relative coefficient residual of the proportionality, after dropping the in-band
  /// degenerate term for parabolas (the x-y cross curvature) and line pairs (the constant).
  double residual = 0.0;
};

/// Degree-one map to the canonical conic: center (or vertex), principal axes, axis scaling.
Canonicalization canonicalize(const ConicRelation& p, double tol = 1e-9);

}  // namespace qmp
