#include <doctest.h>

#include "qmp/conic.hpp"
#include "qmp/error.hpp"
#include "qmp/rank_reduction.hpp"
#include "qmp/transforms.hpp"
#include "support.hpp"

using namespace qmp;

namespace {

// Five atoms whose remainder conic stays away from the origin.
AtomicMeasure five_atoms(Sampler& rng) {
  for (;;) {
    AtomicMeasure mu = testing::random_atoms(rng, 5);
    const MomentMatrix m = moment_matrix(moments_of_measure(mu, 4), 2);
    const SpectralSummary sp = psd_rank(m.entries, 1e-9);
    if (sp.eigenvalues(1) < 1e-5 * sp.eigenvalues(5)) continue;
    if (std::abs(column_relation(m, 1e-9).coefficients[0]) < 0.05) continue;
    return mu;
  }
}

}  // namespace

TEST_CASE("determinant and u0 on the identity") {
  CHECK(determinant(Eigen::MatrixXd::Identity(6, 6)) == doctest::Approx(1.0));
  CHECK(u0(Eigen::MatrixXd::Identity(6, 6)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(u0(Eigen::MatrixXd::Zero(6, 6)), PreconditionError);
}

TEST_CASE("multilinearity in the first diagonal entry") {
  Sampler rng(7);
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd a(6, 6);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) a(r, c) = rng.uniform(-1, 1);
    const Eigen::MatrixXd m = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(6, 6);
    const double t = u0(m);
    Eigen::MatrixXd shifted = m;
    shifted(0, 0) -= t;
    CHECK(std::abs(determinant(shifted)) <= 1e-9 * determinant(m));
  }
}

TEST_CASE("u0 of M^ + u E11") {
  Sampler rng(8);
  for (int k = 0; k < 30; ++k) {
    const AtomicMeasure mu = five_atoms(rng);
    const double u = rng.uniform(0.05, 1.0);
    MomentSequence beta = moments_of_measure(mu, 4);
    beta.set(0, 0, beta.get(0, 0) + u);
    const double got = u0(moment_matrix(beta, 2).entries);
    CHECK(std::abs(got - u) <= 1e-8 * u);
  }
}

TEST_CASE("reduce recovers the five-atom part of a normalized sequence") {
  Sampler rng(9);
  for (int k = 0; k < 30; ++k) {
    AtomicMeasure mu = five_atoms(rng);
    mu.atoms.push_back({0.0, 0.0, rng.uniform(0.1, 1.0)});
    const Normalization n = normalize(moments_of_measure(mu, 4));
    // In normalized coordinates the point mass sits at the image of the origin.
    AtomicMeasure image = pushforward(mu, n.transform);
    const double mass = mu.mass();
    const Atom origin = image.atoms.back();
    image.atoms.pop_back();
    for (Atom& a : image.atoms) a.w /= mass;
    // Translate so that the sixth atom is at the origin of the working sequence.
    const DegreeOneTransform shift{-origin.x, 1, 0, -origin.y, 0, 1};
    const MomentSequence working = transform_moments(n.normalized, shift);
    const RankReduction r = reduce(working);
    CHECK(r.residual_rank == 5);
    CHECK(r.u0 == doctest::Approx(origin.w / mass).epsilon(1e-8));
    const MomentSequence expect = moments_of_measure(pushforward(image, shift), 4);
    CHECK(testing::max_diff(r.reduced_moments, expect) <= 1e-8 * std::max(1.0, expect.max_abs()));
    CHECK(r.first_entry == doctest::Approx(1.0 - origin.w / mass));
  }
}

TEST_CASE("reduce rejects matrices it cannot split") {
  const MomentSequence point = moments_of_measure({{{0.0, 0.0, 1.0}}}, 4);
  CHECK_THROWS_AS(reduce(point), NotPositiveDefiniteError);
}
