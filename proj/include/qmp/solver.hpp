#pragma once

#include <optional>

#include "qmp/conic.hpp"
#include "qmp/extension.hpp"
#include "qmp/moments.hpp"
#include "qmp/options.hpp"
#include "qmp/rank_reduction.hpp"
#include "qmp/trace.hpp"
#include "qmp/transforms.hpp"

namespace qmp {

struct Solution {
  AtomicMeasure measure;  // original coordinates, total mass beta_00
  VerificationReport report;
  CaseTrace trace;
  /// Normalization first, then the canonicalizing maps of the branch taken.
  TransformChain chain;
  Normalization normalization;
  RankReduction reduction;
  ConicRelation relation;
  ConicClass conic;
  /// Map of the relation to its canonical conic. Applied for line pairs; for the other conics
  /// only when the rank-5 solve falls back to canonical coordinates.
  std::optional<Canonicalization> canonical;
  /// Extension as computed, in the frame the branch works in (canonical or line-pair).
  FlatExtension working_extension;
  /// Flat M(3) of the normalized sequence.
  FlatExtension extension;
};

/// Six-atomic representing measure of a quartic sequence with positive definite M(2).
Solution solve_nonsingular(const MomentSequence& beta, const Tolerances& tol = {});

}  // namespace qmp
