#include "qmp/conic.hpp"

#include <cmath>
#include <string>

#include "qmp/error.hpp"

namespace qmp {

ConicRelation ConicRelation::from_coefficients(const std::array<double, 6>& raw) {
  double norm = 0.0;
  for (double c : raw) norm += c * c;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw InputError("conic relation has no nonzero coefficient");
  ConicRelation r;
  double sign = 0.0;
  for (double c : raw) {
    if (std::abs(c) > 1e-12 * norm) {
      sign = c > 0 ? 1.0 : -1.0;
      break;
    }
  }
  for (std::size_t k = 0; k < 6; ++k) r.coefficients[k] = sign * raw[k] / norm;
  return r;
}

Polynomial ConicRelation::polynomial() const {
  return Polynomial(2, {coefficients.begin(), coefficients.end()});
}

double ConicRelation::operator()(double x, double y) const {
  const auto& p = coefficients;
  return p[0] + p[1] * x + p[2] * y + p[3] * x * x + p[4] * x * y + p[5] * y * y;
}

std::string_view to_string(ConicType t) {
  switch (t) {
    case ConicType::Parabola: return "Parabola";
    case ConicType::NondegenerateHyperbola: return "NondegenerateHyperbola";
    case ConicType::IntersectingLines: return "IntersectingLines";
    case ConicType::EllipseOrCircle: return "EllipseOrCircle";
    case ConicType::OtherDegenerate: return "OtherDegenerate";
  }
  return "?";
}

std::string_view to_string(CanonicalForm f) {
  switch (f) {
    case CanonicalForm::Parabola: return "Y=X^2";
    case CanonicalForm::Hyperbola: return "XY=1";
    case CanonicalForm::Lines: return "XY=0";
    case CanonicalForm::Circle: return "X^2+Y^2=1";
    case CanonicalForm::None: return "none";
  }
  return "?";
}

CanonicalForm canonical_target(ConicType t) {
  switch (t) {
    case ConicType::Parabola: return CanonicalForm::Parabola;
    case ConicType::NondegenerateHyperbola: return CanonicalForm::Hyperbola;
    case ConicType::IntersectingLines: return CanonicalForm::Lines;
    case ConicType::EllipseOrCircle: return CanonicalForm::Circle;
    case ConicType::OtherDegenerate: return CanonicalForm::None;
  }
  return CanonicalForm::None;
}

Polynomial canonical_polynomial(CanonicalForm f) {
  switch (f) {
    case CanonicalForm::Parabola: return Polynomial(2, {0, 0, -1, 1, 0, 0});
    case CanonicalForm::Hyperbola: return Polynomial(2, {-1, 0, 0, 0, 1, 0});
    case CanonicalForm::Lines: return Polynomial(2, {0, 0, 0, 0, 1, 0});
    case CanonicalForm::Circle: return Polynomial(2, {-1, 0, 0, 1, 0, 1});
    case CanonicalForm::None: break;
  }
  throw PreconditionError("no canonical polynomial for a degenerate conic");
}

ConicRelation column_relation(const MomentMatrix& reduced, double rank_tol) {
  if (reduced.order != 2) throw PreconditionError("column_relation expects M(2)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced.entries);
  const double threshold = rank_tol * matrix_scale(reduced.entries);
  const int rank = static_cast<int>((eig.eigenvalues().array() > threshold).count());
  if (rank != 5 || eig.eigenvalues()(0) < -threshold)
    throw PreconditionError("column_relation expects a PSD matrix of rank 5, got rank " +
                            std::to_string(rank));
  const Eigen::VectorXd v = eig.eigenvectors().col(0);
  std::array<double, 6> raw{};
  for (int k = 0; k < 6; ++k) raw[k] = v(k);
  ConicRelation rel = ConicRelation::from_coefficients(raw);
  Eigen::Map<const Eigen::VectorXd> n(rel.coefficients.data(), 6);
  rel.residual = (reduced.entries * n).norm();
  if (rel.residual > threshold)
    throw NumericalFailure("column relation residual " + std::to_string(rel.residual) +
                           " exceeds rank tolerance");
  const double quad = std::max({std::abs(rel.coefficients[3]), std::abs(rel.coefficients[4]),
                                std::abs(rel.coefficients[5])});
  if (quad <= 1e-8)
    throw NumericalFailure("the column relation has degree one; columns 1, X, Y are dependent");
  return rel;
}

ConicClass classify(const ConicRelation& rel, double tol) {
  const auto& p = rel.coefficients;
  double s2 = 0.0;
  for (double c : p) s2 += c * c;
  const double s = std::sqrt(s2);
  ConicClass out;
  const double a = p[3], h = p[4] / 2, b = p[5], g = p[1] / 2, f = p[2] / 2, c = p[0];
  out.delta = a * b - h * h;
  out.delta3 = a * (b * c - f * f) - h * (h * c - f * g) + g * (h * f - b * g);
  const bool flat = std::abs(out.delta) <= tol * s2;
  const bool singular = std::abs(out.delta3) <= tol * s2 * s;
  if (flat) {
    out.type = singular ? ConicType::OtherDegenerate : ConicType::Parabola;
  } else if (out.delta < 0) {
    out.type = singular ? ConicType::IntersectingLines : ConicType::NondegenerateHyperbola;
  } else {
    // Real ellipse iff the trace of the quadratic form and delta3 have opposite signs.
    out.type = (!singular && (a + b) * out.delta3 < 0) ? ConicType::EllipseOrCircle
                                                       : ConicType::OtherDegenerate;
  }
  out.target = canonical_target(out.type);
  return out;
}

namespace {

DegreeOneTransform affine_from(const Eigen::Matrix2d& lin, const Eigen::Vector2d& offset) {
  DegreeOneTransform t;
  t.a = offset(0);
  t.b = lin(0, 0);
  t.c = lin(0, 1);
  t.d = offset(1);
  t.e = lin(1, 0);
  t.f = lin(1, 1);
  return t;
}

}  // namespace

Canonicalization canonicalize(const ConicRelation& rel, double tol) {
  const ConicClass cls = classify(rel, tol);
  if (cls.type == ConicType::OtherDegenerate)
    throw UnsupportedCaseError("conic is degenerate (not a parabola, hyperbola, line pair or ellipse)");
  const auto& p = rel.coefficients;
  Eigen::Matrix2d quad;
  quad << p[3], p[4] / 2, p[4] / 2, p[5];
  const Eigen::Vector2d lin(p[1], p[2]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(quad);
  const Eigen::Vector2d lam = eig.eigenvalues();  // ascending
  const Eigen::Matrix2d rot = eig.eigenvectors();

  Canonicalization out;
  out.target = cls.target;
  if (cls.type == ConicType::Parabola) {
    const int nz = std::abs(lam(1)) >= std::abs(lam(0)) ? 1 : 0;
    const double l = lam(nz);
    const Eigen::Vector2d r1 = rot.col(nz), r2 = rot.col(1 - nz);
    const double b1 = r1.dot(lin), b2 = r2.dot(lin);
    if (!(std::abs(b2) > 1e-12 * std::abs(l)))
      throw NumericalFailure("parabola canonicalization: axis coefficient vanishes");
    Eigen::Matrix2d m;
    m.row(0) = r1.transpose();
    m.row(1) = -(b2 / l) * r2.transpose();
    const Eigen::Vector2d off(b1 / (2 * l), -(p[0] - b1 * b1 / (4 * l)) / l);
    out.transform = affine_from(m, off);
  } else {
    const double cond = std::abs(lam(0)) > std::abs(lam(1))
                            ? std::abs(lam(0)) / std::abs(lam(1))
                            : std::abs(lam(1)) / std::abs(lam(0));
    if (!(cond <= 1e12)) throw NumericalFailure("conic center solve is ill-conditioned");
    const Eigen::Vector2d center = -0.5 * rot * (rot.transpose() * lin).cwiseQuotient(lam);
    const double k = p[0] + 0.5 * lin.dot(center);
    Eigen::Matrix2d m;
    if (cls.type == ConicType::EllipseOrCircle) {
      if (!(-k / lam(0) > 0 && -k / lam(1) > 0))
        throw UnsupportedCaseError("ellipse has no real points");
      m.row(0) = std::sqrt(-lam(0) / k) * rot.col(0).transpose();
      m.row(1) = std::sqrt(-lam(1) / k) * rot.col(1).transpose();
    } else {
      // lam(0) < 0 < lam(1); w_pos^2 - w_neg^2 carries the sign of -k.
      const double scale = cls.type == ConicType::IntersectingLines ? 1.0 : std::abs(k);
      const Eigen::RowVector2d wpos = std::sqrt(lam(1) / scale) * rot.col(1).transpose();
      const Eigen::RowVector2d wneg = std::sqrt(-lam(0) / scale) * rot.col(0).transpose();
      const bool pos_first = cls.type == ConicType::IntersectingLines || k < 0;
      const Eigen::RowVector2d lead = pos_first ? wpos : wneg;
      const Eigen::RowVector2d lag = pos_first ? wneg : wpos;
      m.row(0) = lead + lag;
      m.row(1) = lead - lag;
    }
    out.transform = affine_from(m, -m * center);
  }

  // p o Psi^-1 against the target.
  const Polynomial q = compose(rel.polynomial(), invert(out.transform));
  const Polynomial t = canonical_polynomial(out.target);
  double qt = 0.0, tt = 0.0, qq = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    const double qk = q.coefficients()[k], tk = t.coefficients()[k];
    qt += qk * tk;
    tt += tk * tk;
    qq += qk * qk;
  }
  out.factor = qt / tt;
  double err = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    const Monomial mono = monomial_at(k);
    if (cls.type == ConicType::IntersectingLines && mono.degree() == 0) continue;
    if (cls.type == ConicType::Parabola && mono == Monomial{0, 2}) continue;
    const double d = q.coefficients()[k] - out.factor * t.coefficients()[k];
    err += d * d;
  }
  out.residual = std::sqrt(err / qq);
  if (!(out.residual <= 1e-6))
    throw NumericalFailure("canonicalization residual " + format_number(out.residual));
  return out;
}

}  // namespace qmp
