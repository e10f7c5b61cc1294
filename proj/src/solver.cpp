#include "qmp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "qmp/atoms.hpp"
#include "qmp/error.hpp"

namespace qmp {

namespace {

ConicRelation canonical_relation(CanonicalForm f) {
  std::array<double, 6> c{};
  const Polynomial p = canonical_polynomial(f);
  for (int k = 0; k < 6; ++k) c[k] = p.coeff(monomial_at(k));
  return ConicRelation::from_coefficients(c);
}

void solve_generic(Solution& s, const Tolerances& tol, AtomicMeasure& mu) {
  const double u0 = s.reduction.u0;
  s.trace.branch = Branch::GenericConic;
  s.canonical = canonicalize(s.relation, tol.conic);

  // M(1) = I makes the normalized frame the best conditioned one; the canonical frame can
  // squeeze the atoms badly and serves as the fallback.
  Rank5Solution r5;
  MomentSequence m6(6);
  try {
    r5 = solve_rank5_extension(s.reduction.reduced_moments, s.relation, tol);
    mu = r5.measure;
    m6 = r5.extension.moments;
  } catch (const NumericalFailure& err) {
    s.trace.notes.push_back(std::string("normalized frame failed: ") + err.what());
    const DegreeOneTransform psi = s.canonical->transform;
    const MomentSequence in_canon = transform_moments(s.reduction.reduced_moments, psi);
    r5 = solve_rank5_extension(in_canon, canonical_relation(s.canonical->target), tol);
    s.chain.push_back(psi);
    mu = pullback_measure(r5.measure, {psi});
    m6 = transform_moments(r5.extension.moments, invert(psi));
  }
  s.trace.hankel_residual = r5.hankel_residual;
  s.trace.newton_starts = r5.starts_tried;
  s.trace.beta50 = r5.quintic[0];
  s.trace.beta41 = r5.quintic[1];
  s.trace.beta05 = r5.quintic[5];
  s.working_extension = r5.extension;

  mu.atoms.push_back({0.0, 0.0, u0});
  m6.set(0, 0, m6.get(0, 0) + u0);
  s.extension = extension_from_moments(m6, tol.rank);
}

void solve_lines(const MomentSequence& normalized, Solution& s, const Tolerances& tol, AtomicMeasure& mu) {
  s.canonical = canonicalize(s.relation, tol.conic);
  const Canonicalization& canon = *s.canonical;
  const auto [p, q] = canon.transform(0.0, 0.0);
  s.trace.p = p;
  s.trace.q = q;
  const double spread = std::max({1.0, std::abs(p), std::abs(q)});
  if (std::abs(p) <= 1e-9 * spread || std::abs(q) <= 1e-9 * spread)
    throw NumericalFailure("distinguished atom lies on one of the lines",
                           std::make_shared<const CaseTrace>(s.trace));
  const DegreeOneTransform scale{0.0, 1.0 / p, 0.0, 0.0, 0.0, 1.0 / q};
  s.chain.push_back(canon.transform);
  s.chain.push_back(scale);
  const DegreeOneTransform working_map = compose(scale, canon.transform);

  const double m0 = s.reduction.first_entry;
  const MomentSequence working = transform_moments(normalized, working_map).scaled(1.0 / m0);
  FlatExtension ext = solve_pair_of_lines(working, s.trace, tol);
  s.working_extension = ext;

  mu = recover_measure(ext, quadratic_basis(), tol);
  for (Atom& a : mu.atoms) a.w *= m0;
  mu = pullback_measure(mu, {working_map});
  s.extension = extension_from_moments(transform_moments(ext.moments.scaled(m0), invert(working_map)), tol.rank);
}

}  // namespace

Solution solve_nonsingular(const MomentSequence& beta, const Tolerances& tol) {
  if (beta.degree() != 4) throw InputError("solver expects a quartic moment sequence");
  const double mass = beta.get(0, 0);
  if (!(mass > 0)) throw NotPositiveDefiniteError("beta_00 must be positive");
  {
    const SpectralSummary sp = psd_rank(moment_matrix(beta.scaled(1.0 / mass), 2).entries, tol.rank);
    if (!sp.is_psd) throw NotPositiveDefiniteError("M(2) is not positive semidefinite");
    if (sp.rank != 6) throw NotPositiveDefiniteError("M(2) is singular (rank " + std::to_string(sp.rank) + ")");
  }

  Solution s;
  s.normalization = normalize(beta);
  s.chain.push_back(s.normalization.transform);
  const MomentSequence& normalized = s.normalization.normalized;

  try {
    s.reduction = reduce(normalized, tol);
    s.trace.u0 = s.reduction.u0;
    s.relation = column_relation(s.reduction.reduced, s.reduction.rank_tol_used);
    s.conic = classify(s.relation, tol.conic);
    s.trace.conic = s.conic.type;

    AtomicMeasure mu;
    switch (s.conic.type) {
      case ConicType::Parabola:
      case ConicType::NondegenerateHyperbola:
      case ConicType::EllipseOrCircle:
        solve_generic(s, tol, mu);
        break;
      case ConicType::IntersectingLines:
        solve_lines(normalized, s, tol, mu);
        break;
      case ConicType::OtherDegenerate:
        throw UnsupportedCaseError("column relation of the reduced matrix is a degenerate conic other than a line pair");
    }

    const SpectralSummary sp = psd_rank(s.extension.m3.entries, tol.rank);
    if (!sp.is_psd || sp.rank != 6)
      throw NumericalFailure("M(3) is not a flat extension (rank " + std::to_string(sp.rank) + ")");

    for (Atom& a : mu.atoms) a.w *= mass;
    s.measure = pullback_measure(mu, {s.normalization.transform});
    s.report = verify_measure(beta, s.measure, tol.moment, tol.weight);
    s.report.branch = std::string(to_string(*s.trace.branch));
    if (s.measure.size() != 6) throw NumericalFailure("expected 6 atoms, found " + std::to_string(s.measure.size()));
    if (!s.report.success)
      throw NumericalFailure("measure does not reproduce the moments (relative residual " +
                             format_number(s.report.max_rel_residual) + ")");
  } catch (const NumericalFailure& err) {
    if (err.trace() != nullptr) throw;
    throw NumericalFailure(err.what(), std::make_shared<const CaseTrace>(s.trace));
  }
  return s;
}

}  // namespace qmp
