#pragma once

#include <cmath>

#include "qmp/generate.hpp"
#include "qmp/moments.hpp"

namespace qmp::testing {

inline AtomicMeasure random_atoms(Sampler& rng, int n) {
  AtomicMeasure mu;
  for (int k = 0; k < n; ++k)
    mu.atoms.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.1, 1.0)});
  return mu;
}

inline double max_diff(const MomentSequence& a, const MomentSequence& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

inline double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qmp::testing
