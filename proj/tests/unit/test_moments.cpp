#include <doctest.h>

#include "qmp/error.hpp"
#include "qmp/moments.hpp"
#include "support.hpp"

using namespace qmp;

TEST_CASE("moment matrix of a point mass at the origin") {
  MomentSequence beta(4);
  beta.set(0, 0, 1.0);
  const MomentMatrix m = moment_matrix(beta, 2);
  CHECK(m.entries(0, 0) == 1.0);
  CHECK(m.entries.cwiseAbs().sum() == 1.0);
  CHECK(m.labels[4] == Monomial{1, 1});
}

TEST_CASE("constant sequence gives u v v^T") {
  const double u = 0.7;
  const MomentSequence beta = moments_of_measure({{{1.0, 1.0, u}}}, 4);
  for (const double v : beta.values()) CHECK(v == doctest::Approx(u));
  const MomentMatrix m = moment_matrix(beta, 2);
  CHECK(testing::max_diff(m.entries, Eigen::MatrixXd::Constant(6, 6, u)) < 1e-15);
  const SpectralSummary sp = psd_rank(moment_matrix(moments_of_measure({{{1.0, 1.0, 1.0}}}, 4), 2).entries, 1e-9);
  CHECK(sp.is_psd);
  CHECK(sp.rank == 1);
  CHECK(std::abs(sp.min_eigenvalue) < 1e-12);
}

TEST_CASE("two-atom measure") {
  const AtomicMeasure mu{{{1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}}};
  const MomentSequence beta = moments_of_measure(mu, 2);
  const std::vector<double> expect{1, 0.5, 0.5, 0.5, 0, 0.5};
  for (std::size_t k = 0; k < 6; ++k) CHECK(beta.values()[k] == doctest::Approx(expect[k]));
  Eigen::Matrix3d m1;
  m1 << 1, 0.5, 0.5, 0.5, 0.5, 0, 0.5, 0, 0.5;
  CHECK(testing::max_diff(moment_matrix(beta, 1).entries, m1) < 1e-15);
}

TEST_CASE("missing moments are input errors") {
  const MomentSequence beta(2);
  CHECK_THROWS_AS(moment_matrix(beta, 2), InputError);
  CHECK_THROWS_AS(beta.get(3, 0), InputError);
}

TEST_CASE("riesz functional") {
  Sampler rng(3);
  const MomentSequence beta = moments_of_measure(testing::random_atoms(rng, 4), 4);
  CHECK(riesz(beta, Polynomial::constant(1.0)) == beta.get(0, 0));
  CHECK(riesz(beta, Polynomial::monomial({2, 2})) == beta.get(2, 2));
  CHECK(riesz(beta, Polynomial::affine(1, 2, 0)) == doctest::Approx(beta.get(0, 0) + 2 * beta.get(1, 0)));
  CHECK_THROWS_AS(riesz(beta, Polynomial::monomial({5, 0})), InputError);
}

TEST_CASE("psd_rank") {
  const SpectralSummary id = psd_rank(Eigen::MatrixXd::Identity(6, 6), 1e-9);
  CHECK(id.is_psd);
  CHECK(id.rank == 6);
  CHECK(id.min_eigenvalue == doctest::Approx(1.0));
  Sampler rng(5);
  for (int k = 0; k < 20; ++k) {
    const SpectralSummary sp = psd_rank(moment_matrix(moments_of_measure(testing::random_atoms(rng, 5), 4), 2).entries, 1e-9);
    CHECK(sp.is_psd);
    CHECK(sp.rank <= 5);
  }
}

TEST_CASE("verify_measure") {
  Sampler rng(11);
  const AtomicMeasure mu = testing::random_atoms(rng, 6);
  const MomentSequence beta = moments_of_measure(mu, 4);
  const VerificationReport exact = verify_measure(beta, mu, 1e-8);
  CHECK(exact.success);
  CHECK(exact.max_abs_residual < 1e-14);
  CHECK(exact.atom_count == 6);

  // One weight off by eps moves each moment by eps * x^i y^j of that atom.
  const double eps = 1e-6;
  AtomicMeasure off = mu;
  off.atoms[2].w += eps;
  double bound = 0.0;
  for (const Monomial m : monomials_up_to(4))
    bound = std::max(bound, std::abs(std::pow(mu.atoms[2].x, m.i) * std::pow(mu.atoms[2].y, m.j)));
  const VerificationReport r = verify_measure(beta, off, 1e-8);
  CHECK(r.max_abs_residual == doctest::Approx(eps * bound).epsilon(1e-6));
  CHECK_FALSE(r.success);

  AtomicMeasure negative = mu;
  negative.atoms[0].w = -0.1;
  const VerificationReport n = verify_measure(moments_of_measure(negative, 4), negative, 1e-8);
  CHECK_FALSE(n.positive_weights);
  CHECK_FALSE(n.success);
}
