#pragma once

#include <Eigen/Dense>

#include "qmp/moments.hpp"
#include "qmp/options.hpp"

namespace qmp {

/// M = reduced + u0 * E11, where reduced is the rank-5 PSD moment matrix that remains
/// after removing the point mass u0 * delta_(0,0).
struct RankReduction {
  double u0 = 0.0;
  MomentMatrix reduced;
  MomentSequence reduced_moments{4};
  int residual_rank = 0;
  /// (1,1) entry of the reduced matrix, beta_00 - u0.
  double first_entry = 0.0;
  SpectralSummary spectrum;
  /// Rank tolerance that was finally accepted (the configured one or one decade looser).
  double rank_tol_used = 0.0;
};

/// det of a square matrix through partially pivoted LU.
double determinant(const Eigen::MatrixXd& m);

/// det M / det M_{2..n}. Requires M symmetric positive definite.
double u0(const Eigen::MatrixXd& m);

/// Splits a positive definite M(2) into M^(2) + u0 E11. Throws NumericalFailure when the
/// remainder is not PSD of rank exactly 5 even after one decade of tolerance relaxation.
RankReduction reduce(const MomentSequence& beta, const Tolerances& tol = {});

}  // namespace qmp
