#include "qmp/generate.hpp"

#include <cmath>
#include <numbers>

#include "qmp/error.hpp"

namespace qmp {

ConicConstraint parse_constraint(const std::string& name) {
  if (name == "none" || name.empty()) return ConicConstraint::None;
  if (name == "xy" || name == "lines") return ConicConstraint::Lines;
  if (name == "parabola") return ConicConstraint::Parabola;
  if (name == "circle") return ConicConstraint::Circle;
  if (name == "hyperbola") return ConicConstraint::Hyperbola;
  throw InputError("unknown conic constraint '" + name + "'");
}

std::string to_string(ConicConstraint c) {
  switch (c) {
    case ConicConstraint::None: return "none";
    case ConicConstraint::Lines: return "xy";
    case ConicConstraint::Parabola: return "parabola";
    case ConicConstraint::Circle: return "circle";
    case ConicConstraint::Hyperbola: return "hyperbola";
  }
  return "none";
}

double Sampler::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double condition_number(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseAbs();
  const double lo = lam.minCoeff();
  return lo > 0 ? lam.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

namespace {

Atom on_conic(Sampler& rng, ConicConstraint c) {
  const double w = rng.uniform(0.1, 1.0);
  switch (c) {
    case ConicConstraint::Lines: {
      const double t = rng.uniform(-2.0, 2.0);
      return rng.uniform(0.0, 1.0) < 0.5 ? Atom{t, 0.0, w} : Atom{0.0, t, w};
    }
    case ConicConstraint::Parabola: {
      const double x = rng.uniform(-1.4, 1.4);
      return {x, x * x, w};
    }
    case ConicConstraint::Circle: {
      const double t = rng.uniform(0.0, 2 * std::numbers::pi);
      return {std::cos(t), std::sin(t), w};
    }
    case ConicConstraint::Hyperbola: {
      const double x = rng.uniform(0.5, 2.0) * (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      return {x, 1.0 / x, w};
    }
    case ConicConstraint::None: break;
  }
  return {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), w};
}

double conic_value(ConicConstraint c, double x, double y) {
  switch (c) {
    case ConicConstraint::Lines: return x * y;
    case ConicConstraint::Parabola: return y - x * x;
    case ConicConstraint::Circle: return x * x + y * y - 1;
    case ConicConstraint::Hyperbola: return x * y - 1;
    case ConicConstraint::None: break;
  }
  return 1.0;
}

}  // namespace

Instance generate_instance(Sampler& rng, const GeneratorOptions& opts) {
  for (int attempt = 1; attempt <= opts.max_tries; ++attempt) {
    AtomicMeasure mu;
    for (int k = 0; k < 5; ++k) mu.atoms.push_back(on_conic(rng, opts.constraint));
    Atom last{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.1, 1.0)};
    if (opts.constraint != ConicConstraint::None) {
      if (opts.centered) {
        double mass = 0, sx = 0, sy = 0;
        for (const Atom& a : mu.atoms) {
          mass += a.w;
          sx += a.w * a.x;
          sy += a.w * a.y;
        }
        last.x = sx / mass;
        last.y = sy / mass;
      }
      if (std::abs(conic_value(opts.constraint, last.x, last.y)) < 0.05) continue;
    }
    mu.atoms.push_back(last);

    Instance inst;
    inst.beta = moments_of_measure(mu, 4);
    inst.truth = std::move(mu);
    inst.condition = condition_number(moment_matrix(inst.beta, 2).entries);
    inst.tries = attempt;
    if (inst.condition <= opts.max_condition) return inst;
  }
  throw NumericalFailure("instance generator exhausted its rejection budget");
}

std::vector<Instance> generate_instances(int count, std::uint64_t seed, const GeneratorOptions& opts) {
  Sampler rng(seed);
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) out.push_back(generate_instance(rng, opts));
  return out;
}

}  // namespace qmp
