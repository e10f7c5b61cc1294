#include <doctest.h>

#include "qmp/error.hpp"
#include "qmp/solver.hpp"
#include "support.hpp"

using namespace qmp;

TEST_CASE("random six-atomic measures are recovered") {
  Sampler rng(40);
  for (int k = 0; k < 30; ++k) {
    const Instance inst = generate_instance(rng);
    const Solution s = solve_nonsingular(inst.beta);
    CHECK(s.report.success);
    CHECK(s.measure.size() == 6);
    CHECK(s.report.max_rel_residual <= 1e-6);
    CHECK(s.extension.rank == 6);
  }
}

TEST_CASE("scaled mass is preserved") {
  Sampler rng(41);
  const Instance inst = generate_instance(rng);
  const Solution s = solve_nonsingular(inst.beta.scaled(7.5));
  CHECK(s.measure.mass() == doctest::Approx(7.5 * inst.truth.mass()).epsilon(1e-9));
}

TEST_CASE("five atoms on a circle and one at its center") {
  AtomicMeasure mu;
  for (int k = 0; k < 5; ++k) mu.atoms.push_back({std::cos(1.25 * k + 0.1), std::sin(1.25 * k + 0.1), 0.2 + 0.1 * k});
  mu.atoms.push_back({0.0, 0.0, 0.5});
  const Solution s = solve_nonsingular(moments_of_measure(mu, 4));
  CHECK(s.report.success);
  REQUIRE(s.trace.branch);
  CHECK(*s.trace.branch == Branch::GenericConic);
}

TEST_CASE("five atoms on the axes and one at their mean") {
  AtomicMeasure mu{{{1, 0, 0.3}, {-1.5, 0, 0.4}, {0.7, 0, 0.2}, {0, 1.2, 0.5}, {0, -0.8, 0.3}}};
  const double mass = mu.mass();
  double sx = 0, sy = 0;
  for (const Atom& a : mu.atoms) {
    sx += a.w * a.x;
    sy += a.w * a.y;
  }
  mu.atoms.push_back({sx / mass, sy / mass, 0.4});
  const Solution s = solve_nonsingular(moments_of_measure(mu, 4));
  CHECK(s.report.success);
  REQUIRE(s.trace.conic);
  CHECK(*s.trace.conic == ConicType::IntersectingLines);
}

TEST_CASE("singular and indefinite inputs are rejected") {
  const AtomicMeasure five{{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {2, 3, 1}}};
  CHECK_THROWS_AS(solve_nonsingular(moments_of_measure(five, 4)), NotPositiveDefiniteError);

  Sampler rng(42);
  AtomicMeasure signed_mu = testing::random_atoms(rng, 6);
  signed_mu.atoms[0].w = -1.0;
  CHECK_THROWS_AS(solve_nonsingular(moments_of_measure(signed_mu, 4)), NotPositiveDefiniteError);
  CHECK_THROWS_AS(solve_nonsingular(MomentSequence(3)), InputError);
}
