#pragma once

namespace qmp {

/// Numerical thresholds shared by every stage of the solver.
struct Tolerances {
  /// Eigenvalues at or below rank * max(1, ||M||_inf) count as zero.
  double rank = 1e-9;
  /// Atoms lighter than weight * (total mass) are rejected.
  double weight = 1e-10;
  /// Relative moment residual accepted by verification.
  double moment = 1e-8;
  /// Scale-invariant band for conic degeneracy tests and branch decisions.
  double conic = 1e-9;
};

}  // namespace qmp
