#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qmp/moments.hpp"

namespace qmp {

/// Curve carrying five of the six sampled atoms.
enum class ConicConstraint { None, Lines, Parabola, Circle, Hyperbola };

/// Accepts "none", "xy", "parabola", "circle", "hyperbola". Throws InputError otherwise.
ConicConstraint parse_constraint(const std::string& name);
std::string to_string(ConicConstraint c);

struct GeneratorOptions {
  ConicConstraint constraint = ConicConstraint::None;
  /// Put the sixth atom at the weighted mean of the five constrained ones, which makes it the
  /// point mass removed by rank reduction.
  bool centered = false;
  double max_condition = 1e8;
  int max_tries = 1000;
};

struct Instance {
  MomentSequence beta;
  AtomicMeasure truth;
  double condition = 0.0;
  int tries = 0;
};

/// Uniform doubles from a 64-bit Mersenne twister, identical on every platform.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [lo, hi) with 53 random bits.
  double uniform(double lo, double hi);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Six atoms in [-2, 2]^2 with weights in [0.1, 1]; rejects M(2) with condition number above
/// the limit. Throws NumericalFailure when the rejection budget runs out.
Instance generate_instance(Sampler& rng, const GeneratorOptions& opts = {});

std::vector<Instance> generate_instances(int count, std::uint64_t seed, const GeneratorOptions& opts = {});

/// 2-norm condition number of a symmetric matrix.
double condition_number(const Eigen::MatrixXd& m);

}  // namespace qmp
