#include <doctest.h>

#include "qmp/conic.hpp"
#include "qmp/error.hpp"
#include "qmp/transforms.hpp"
#include "support.hpp"

using namespace qmp;

namespace {

ConicRelation rel(double c00, double c10, double c01, double c20, double c11, double c02) {
  return ConicRelation::from_coefficients({c00, c10, c01, c20, c11, c02});
}

// |<p, q>| / (|p| |q|)
double alignment(const ConicRelation& p, const std::array<double, 6>& q) {
  double pq = 0, qq = 0;
  for (int k = 0; k < 6; ++k) {
    pq += p.coefficients[k] * q[k];
    qq += q[k] * q[k];
  }
  return std::abs(pq) / std::sqrt(qq);
}

AtomicMeasure on_curve(Sampler& rng, int which) {
  AtomicMeasure mu;
  for (int k = 0; k < 5; ++k) {
    const double t = rng.uniform(-1.5, 1.5), w = rng.uniform(0.1, 1.0);
    if (which == 0) mu.atoms.push_back({t, t * t, w});
    if (which == 1) mu.atoms.push_back({std::cos(2 * t), std::sin(2 * t), w});
    if (which == 2) mu.atoms.push_back(k < 2 ? Atom{t, 0, w} : Atom{0, t, w});
  }
  return mu;
}

}  // namespace

TEST_CASE("classification of the standard forms") {
  CHECK(classify(rel(0, 0, 0, 0, 1, 0)).type == ConicType::IntersectingLines);
  CHECK(classify(rel(0, 0, 1, -1, 0, 0)).type == ConicType::Parabola);
  CHECK(classify(rel(-1, 0, 0, 1, 0, 1)).type == ConicType::EllipseOrCircle);
  CHECK(classify(rel(-1, 0, 0, 0, 1, 0)).type == ConicType::NondegenerateHyperbola);
  CHECK(classify(rel(1, 0, 0, 1, 0, 1)).type == ConicType::OtherDegenerate);   // no real points
  CHECK(classify(rel(-1, 0, 0, 1, 0, 0)).type == ConicType::OtherDegenerate);  // parallel lines
  CHECK(classify(rel(0, 0, 1, -1, 0, 0)).target == CanonicalForm::Parabola);
}

TEST_CASE("column relations from atoms") {
  Sampler rng(12);
  const std::array<std::array<double, 6>, 3> expect{{{0, 0, 1, -1, 0, 0}, {-1, 0, 0, 1, 0, 1}, {0, 0, 0, 0, 1, 0}}};
  for (int which = 0; which < 3; ++which) {
    const MomentMatrix m = moment_matrix(moments_of_measure(on_curve(rng, which), 4), 2);
    const ConicRelation p = column_relation(m, 1e-9);
    CHECK(alignment(p, expect[which]) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.residual <= 1e-8 * m.entries.norm());
  }
}

TEST_CASE("column_relation needs rank 5") {
  CHECK_THROWS_AS(column_relation(moment_matrix(moments_of_measure({{{1, 1, 1}}}, 4), 2), 1e-9), PreconditionError);
}

TEST_CASE("canonical maps") {
  auto check_map = [](const ConicRelation& p, CanonicalForm target) {
    const Canonicalization c = canonicalize(p);
    CHECK(c.target == target);
    CHECK(c.residual <= 1e-9);
    return c;
  };
  const Canonicalization shift = check_map(rel(2, -2, -1, 0, 1, 0), CanonicalForm::Lines);  // (x-1)(y-2)
  const auto [x0, y0] = shift.transform(1.0, 2.0);
  CHECK(std::abs(x0) < 1e-12);
  CHECK(std::abs(y0) < 1e-12);
  check_map(rel(-1, 0, 0, 1, 0, -1), CanonicalForm::Hyperbola);
  check_map(rel(-4, 0, 0, 4, 0, 1), CanonicalForm::Circle);
  check_map(rel(0.3, 0.2, 1, -1, 0.4, -0.04), CanonicalForm::Parabola);  // y - (x - 0.2 y)^2 + ...

  // Points on the conic land on the canonical curve.
  const Canonicalization e = canonicalize(rel(-4, 0, 0, 4, 0, 1));
  for (const double t : {0.0, 0.7, 2.0}) {
    const auto [x, y] = e.transform(std::cos(t), 2 * std::sin(t));
    CHECK(x * x + y * y == doctest::Approx(1.0));
  }
}
