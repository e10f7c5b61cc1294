#include <doctest.h>

#include "qmp/error.hpp"
#include "qmp/generate.hpp"

using namespace qmp;

TEST_CASE("same seed, same instances") {
  const auto a = generate_instances(5, 9);
  const auto b = generate_instances(5, 9);
  for (int k = 0; k < 5; ++k) {
    CHECK(a[k].truth.size() == 6);
    for (std::size_t i = 0; i < a[k].beta.size(); ++i) CHECK(a[k].beta.values()[i] == b[k].beta.values()[i]);
  }
  CHECK(generate_instances(1, 10)[0].beta.values()[1] != a[0].beta.values()[1]);
}

TEST_CASE("sampler range") {
  Sampler rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform(-2.0, 5.0);
    CHECK(x >= -2.0);
    CHECK(x < 5.0);
  }
}

TEST_CASE("five atoms on the requested conic") {
  const struct {
    ConicConstraint c;
    double (*f)(double, double);
  } cases[] = {
      {ConicConstraint::Lines, [](double x, double y) { return x * y; }},
      {ConicConstraint::Parabola, [](double x, double y) { return y - x * x; }},
      {ConicConstraint::Circle, [](double x, double y) { return x * x + y * y - 1; }},
      {ConicConstraint::Hyperbola, [](double x, double y) { return x * y - 1; }},
  };
  for (const auto& tc : cases) {
    for (const bool centered : {false, true}) {
      GeneratorOptions opts;
      opts.constraint = tc.c;
      opts.centered = centered;
      for (const Instance& inst : generate_instances(10, 4, opts)) {
        for (int k = 0; k < 5; ++k) CHECK(std::abs(tc.f(inst.truth.atoms[k].x, inst.truth.atoms[k].y)) < 1e-12);
        CHECK(std::abs(tc.f(inst.truth.atoms[5].x, inst.truth.atoms[5].y)) >= 0.05);
        CHECK(inst.condition <= opts.max_condition);
      }
    }
  }
}

TEST_CASE("constraint names") {
  CHECK(parse_constraint("xy") == ConicConstraint::Lines);
  CHECK(to_string(parse_constraint("hyperbola")) == "hyperbola");
  CHECK_THROWS_AS(parse_constraint("ellipse2"), InputError);
}

TEST_CASE("rejection budget") {
  GeneratorOptions opts;
  opts.max_condition = 1.0;
  opts.max_tries = 5;
  Sampler rng(1);
  CHECK_THROWS_AS(generate_instance(rng, opts), NumericalFailure);
}
