#pragma once

#include <array>

#include <Eigen/Dense>

#include "qmp/conic.hpp"
#include "qmp/moments.hpp"
#include "qmp/options.hpp"
#include "qmp/trace.hpp"

namespace qmp {

/// The six degree-5 moments of an extension: beta50, beta41, beta32, beta23, beta14, beta05.
using Quintic = std::array<double, 6>;

Quintic quintic_of(const MomentSequence& beta);

/// B(3): rows 1, X, Y, X^2, XY, Y^2; columns X^3, X^2Y, XY^2, Y^3; entry beta_{row+col}
/// with degree-5 entries drawn from `quintic`.
Eigen::MatrixXd build_b3(const MomentSequence& beta, const Quintic& quintic);

struct ExtensionBlocks {
  Eigen::MatrixXd b;  // 6x4
  Eigen::MatrixXd w;  // M W = B
  Eigen::MatrixXd c;  // W^T M W
  Quintic quintic{};
};

/// W from M W = B (pseudo-inverse on the range when M is singular) and C = W^T M W.
/// Throws NumericalFailure when B leaves the range of a singular M.
ExtensionBlocks smuljan_extend(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b, double rank_tol = 1e-9);

/// Entries of C in 1-based notation: E1 = C13 - C22, E2 = C14 - C23, E3 = C24 - C33.
struct HankelResiduals {
  double e1 = 0, e2 = 0, e3 = 0;
  double max_abs() const noexcept;
};

HankelResiduals hankel_residuals(const Eigen::MatrixXd& c);

/// A moment matrix M(3) extending M(2). `moments` holds all 28 moments up to degree 6.
struct FlatExtension {
  MomentMatrix m3;
  MomentSequence moments{6};
  int rank = 0;
  /// Hankel defect of the raw block matrix [M B; B^T C] before symmetrization.
  double hankel_defect = 0.0;
};

/// [M(2) B; B^T C] read as a degree-6 moment sequence. C entries sharing an exponent are averaged.
FlatExtension assemble_extension(const MomentSequence& beta, const ExtensionBlocks& blocks,
                                 double rank_tol = 1e-9);

/// Flat extension of a degree-6 sequence already known in full.
FlatExtension extension_from_moments(const MomentSequence& moments6, double rank_tol = 1e-9);

struct Rank5Solution {
  FlatExtension extension;
  AtomicMeasure measure;
  Quintic quintic{};
  double hankel_residual = 0.0;
  int starts_tried = 0;
};

/// Flat rank-5 extension of a PSD rank-5 M^(2) whose column relation is a parabola,
/// nondegenerate hyperbola or ellipse, and the 5-atomic measure it determines.
Rank5Solution solve_rank5_extension(const MomentSequence& reduced, const ConicRelation& relation,
                                    const Tolerances& tol = {});

/// Flat extension of an invertible M(2) = M^(2) + u v v^T in line-pair normal form: M^(2)
/// carries XY = 0, has (1,1) entry 1, and v is the monomial vector of (1, 1).
FlatExtension solve_pair_of_lines(const MomentSequence& working, CaseTrace& trace,
                                  const Tolerances& tol = {});

/// Working M(2) of the line-pair normal form for the given parameters.
MomentSequence line_pair_moments(const LineParameters& p);

}  // namespace qmp
