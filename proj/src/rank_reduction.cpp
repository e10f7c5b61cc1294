#include "qmp/rank_reduction.hpp"

#include <cmath>
#include <string>

#include "qmp/error.hpp"

namespace qmp {

double determinant(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw PreconditionError("determinant of a non-square matrix");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

double u0(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 2) throw PreconditionError("u0 needs a square matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * matrix_scale(m))
    throw PreconditionError("u0 needs a symmetric matrix");
  const SpectralSummary s = psd_rank(m, 0.0);
  if (!(s.min_eigenvalue > 0.0)) throw PreconditionError("u0 needs a positive definite matrix");
  const Eigen::Index n = m.rows() - 1;
  const double minor = determinant(m.bottomRightCorner(n, n));
  return determinant(m) / minor;
}

namespace {

bool acceptable(const SpectralSummary& s, int size) { return s.is_psd && s.rank == size - 1; }

}  // namespace

RankReduction reduce(const MomentSequence& beta, const Tolerances& tol) {
  const MomentMatrix m = moment_matrix(beta, 2);
  RankReduction r;
  try {
    r.u0 = u0(m.entries);
  } catch (const PreconditionError& e) {
    throw NotPositiveDefiniteError(std::string("rank reduction: ") + e.what());
  }
  if (!(r.u0 > 0.0)) throw NumericalFailure("rank reduction: u0 is not positive");

  r.reduced_moments = beta.truncated(4);
  r.reduced_moments.set(0, 0, beta.get(0, 0) - r.u0);
  r.reduced = moment_matrix(r.reduced_moments, 2);
  r.first_entry = r.reduced.entries(0, 0);

  const int size = static_cast<int>(m.size());
  r.rank_tol_used = tol.rank;
  r.spectrum = psd_rank(r.reduced.entries, r.rank_tol_used);
  if (!acceptable(r.spectrum, size)) {
    r.rank_tol_used = tol.rank * 10.0;
    r.spectrum = psd_rank(r.reduced.entries, r.rank_tol_used);
  }
  r.residual_rank = r.spectrum.rank;
  if (!acceptable(r.spectrum, size))
    throw NumericalFailure("rank reduction: M - u0 E11 has rank " + std::to_string(r.residual_rank) +
                           (r.spectrum.is_psd ? "" : " and is not PSD") + " (expected PSD rank 5)");
  if (!(r.first_entry > 0.0)) throw NumericalFailure("rank reduction: beta_00 - u0 is not positive");
  // Columns 1, X, Y independent: the leading 3x3 block stays positive definite.
  const SpectralSummary lead = psd_rank(r.reduced.entries.topLeftCorner(3, 3), r.rank_tol_used);
  if (lead.rank != 3)
    throw NumericalFailure("rank reduction: columns 1, X, Y of the reduced matrix are dependent");
  return r;
}

}  // namespace qmp
