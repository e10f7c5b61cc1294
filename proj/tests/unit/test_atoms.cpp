#include <doctest.h>

#include <algorithm>

#include "qmp/atoms.hpp"
#include "qmp/error.hpp"
#include "qmp/extension.hpp"
#include "support.hpp"

using namespace qmp;

namespace {

bool contains(const std::vector<Point>& pts, double x, double y, double tol) {
  return std::any_of(pts.begin(), pts.end(),
                     [&](const Point& p) { return std::abs(p.x - x) <= tol && std::abs(p.y - y) <= tol; });
}

}  // namespace

TEST_CASE("multiplication matrices carry the x coordinates") {
  Sampler rng(30);
  const AtomicMeasure mu = testing::random_atoms(rng, 6);
  const FlatExtension ext = extension_from_moments(moments_of_measure(mu, 6));
  const MultiplicationPair pair = multiplication_matrices(ext.m3, quadratic_basis());
  Eigen::VectorXd ev = pair.mx.eigenvalues().real();
  std::sort(ev.data(), ev.data() + ev.size());
  std::vector<double> xs;
  for (const Atom& a : mu.atoms) xs.push_back(a.x);
  std::sort(xs.begin(), xs.end());
  for (int k = 0; k < 6; ++k) CHECK(ev(k) == doctest::Approx(xs[k]).epsilon(1e-8));
  CHECK(pair.commutator() < 1e-8);
}

TEST_CASE("atoms sharing an x coordinate are still separated") {
  const AtomicMeasure mu{{{0, 0, 0.3}, {1, 1, 0.2}, {1, -1, 0.4}, {-1, 0.5, 0.3}, {0.5, 2, 0.2}, {-1.5, -1, 0.6}}};
  const FlatExtension ext = extension_from_moments(moments_of_measure(mu, 6));
  const std::vector<Point> pts = extract_atoms(multiplication_matrices(ext.m3, quadratic_basis()));
  REQUIRE(pts.size() == 6);
  for (const Atom& a : mu.atoms) CHECK(contains(pts, a.x, a.y, 1e-8));
}

TEST_CASE("one-dimensional pair") {
  MultiplicationPair pair{Eigen::MatrixXd::Constant(1, 1, 0.25), Eigen::MatrixXd::Constant(1, 1, -3.0), {{0, 0}}};
  const std::vector<Point> pts = extract_atoms(pair);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == doctest::Approx(0.25));
  CHECK(pts[0].y == doctest::Approx(-3.0));
}

TEST_CASE("weights") {
  MomentSequence point(4);
  point.set(0, 0, 1.0);
  const std::vector<Point> origin{{0, 0}};
  CHECK(solve_weights(origin, point, {{0, 0}})[0] == doctest::Approx(1.0));

  Sampler rng(31);
  const AtomicMeasure mu = testing::random_atoms(rng, 6);
  std::vector<Point> pts;
  for (const Atom& a : mu.atoms) pts.push_back({a.x, a.y});
  const std::vector<double> w = solve_weights(pts, moments_of_measure(mu, 4), quadratic_basis());
  for (int k = 0; k < 6; ++k) CHECK(w[k] == doctest::Approx(mu.atoms[k].w).epsilon(1e-8));

  AtomicMeasure negative = mu;
  negative.atoms[3].w = -0.2;
  CHECK_THROWS_AS(solve_weights(pts, moments_of_measure(negative, 4), quadratic_basis()), NumericalFailure);
}

TEST_CASE("recover_measure round trip") {
  Sampler rng(32);
  for (int k = 0; k < 20; ++k) {
    const AtomicMeasure mu = testing::random_atoms(rng, 6);
    const MomentSequence m6 = moments_of_measure(mu, 6);
    const AtomicMeasure got = recover_measure(extension_from_moments(m6), quadratic_basis());
    CHECK(got.size() == 6);
    CHECK(verify_measure(m6.truncated(4), got, 1e-8).success);
  }
}

TEST_CASE("dependent basis columns") {
  const AtomicMeasure mu{{{0, 0, 1}, {1, 1, 1}}};
  const FlatExtension ext = extension_from_moments(moments_of_measure(mu, 6));
  CHECK_THROWS_AS(multiplication_matrices(ext.m3, quadratic_basis()), PreconditionError);
}
