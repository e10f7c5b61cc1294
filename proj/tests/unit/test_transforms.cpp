#include <doctest.h>

#include "qmp/error.hpp"
#include "qmp/transforms.hpp"
#include "support.hpp"

using namespace qmp;

namespace {

DegreeOneTransform random_map(Sampler& rng) {
  for (;;) {
    DegreeOneTransform t{rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-2, 2),
                         rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    if (std::abs(t.jacobian()) > 0.3) return t;
  }
}

}  // namespace

TEST_CASE("identity transform") {
  Sampler rng(1);
  const MomentSequence beta = moments_of_measure(testing::random_atoms(rng, 6), 4);
  CHECK(testing::max_diff(transform_moments(beta, DegreeOneTransform::identity()), beta) < 1e-15);
  CHECK(testing::max_diff(j_matrix(DegreeOneTransform::identity(), 2), Eigen::MatrixXd::Identity(6, 6)) == 0.0);
}

TEST_CASE("moments of the pushforward") {
  Sampler rng(2);
  for (int k = 0; k < 20; ++k) {
    const AtomicMeasure mu = testing::random_atoms(rng, 6);
    const DegreeOneTransform psi = random_map(rng);
    const MomentSequence beta = moments_of_measure(mu, 4);
    const MomentSequence direct = moments_of_measure(pushforward(mu, psi), 4);
    CHECK(testing::max_diff(transform_moments(beta, psi), direct) < 1e-11 * std::max(1.0, direct.max_abs()));
  }
}

TEST_CASE("congruence through J") {
  Sampler rng(3);
  for (int k = 0; k < 20; ++k) {
    const MomentSequence beta = moments_of_measure(testing::random_atoms(rng, 6), 4);
    const DegreeOneTransform psi = random_map(rng);
    const Eigen::MatrixXd m = moment_matrix(beta, 2).entries;
    const Eigen::MatrixXd j = j_matrix(psi, 2);
    const Eigen::MatrixXd mt = moment_matrix(transform_moments(beta, psi), 2).entries;
    CHECK((mt - j.transpose() * m * j).norm() <= 1e-10 * m.norm());
  }
  const DegreeOneTransform scale{0, 0.5, 0, 0, 0, 4.0};
  Eigen::Matrix3d d = Eigen::Vector3d(1, 0.5, 4.0).asDiagonal();
  CHECK(testing::max_diff(j_matrix(scale, 1), d) < 1e-15);
  CHECK_THROWS_AS(j_matrix({0, 1, 2, 0, 2, 4}, 2), InputError);
}

TEST_CASE("rotation keeps M(1) = I") {
  Sampler rng(4);
  const Normalization n = normalize(moments_of_measure(testing::random_atoms(rng, 6), 4));
  const MomentSequence r = transform_moments(n.normalized, {0, 0, -1, 0, 1, 0});
  CHECK(testing::max_diff(moment_matrix(r, 1).entries, Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
}

TEST_CASE("normalization") {
  Sampler rng(5);
  for (int k = 0; k < 20; ++k) {
    const MomentSequence beta = moments_of_measure(testing::random_atoms(rng, 6), 4);
    const Normalization n = normalize(beta);
    CHECK(testing::max_diff(moment_matrix(n.normalized, 1).entries, Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
    CHECK(n.normalized.get(0, 0) == doctest::Approx(1.0));
    // Normalizing again changes nothing in the first six moments.
    const Normalization again = normalize(n.normalized);
    const std::vector<double> first{1, 0, 0, 1, 0, 1};
    for (std::size_t m = 0; m < 6; ++m) CHECK(std::abs(again.normalized.values()[m] - first[m]) < 1e-12);
  }
  MomentSequence b(4);
  b.set(0, 0, 1.0);
  b.set(1, 0, 0.5);
  b.set(2, 0, 1.0);
  b.set(0, 2, 1.0);
  CHECK(normalize(b).d2 == doctest::Approx(0.75));
  MomentSequence point(4);
  point.set(0, 0, 1.0);
  CHECK_THROWS_AS(normalize(point), NotPositiveDefiniteError);
}

TEST_CASE("invert, compose, pullback") {
  Sampler rng(6);
  const DegreeOneTransform a = random_map(rng), b = random_map(rng);
  const auto [x1, y1] = compose(b, a)(0.3, -0.7);
  const auto [xa, ya] = a(0.3, -0.7);
  const auto [x2, y2] = b(xa, ya);
  CHECK(x1 == doctest::Approx(x2));
  CHECK(y1 == doctest::Approx(y2));
  const auto [xi, yi] = invert(a)(xa, ya);
  CHECK(xi == doctest::Approx(0.3));
  CHECK(yi == doctest::Approx(-0.7));
  CHECK_THROWS_AS(invert({0, 1, 1, 0, 1, 1}), InputError);

  const AtomicMeasure mu{{{1.0, 1.0, 0.4}}};
  CHECK(pullback_measure(mu, {}).atoms[0].x == 1.0);
  const AtomicMeasure back = pullback_measure(mu, {{0, 0.5, 0, 0, 0, 1}});
  CHECK(back.atoms[0].x == doctest::Approx(2.0));
  CHECK(back.atoms[0].y == doctest::Approx(1.0));
  CHECK(back.atoms[0].w == 0.4);
}
