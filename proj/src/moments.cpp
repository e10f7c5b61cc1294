#include "qmp/moments.hpp"

#include <algorithm>
#include <cmath>

#include "qmp/error.hpp"

namespace qmp {

MomentSequence::MomentSequence(int degree) : degree_(degree), values_(monomial_count(degree), 0.0) {
  if (degree < 0) throw InputError("moment sequence degree must be nonnegative");
}

MomentSequence::MomentSequence(int degree, std::vector<double> values)
    : degree_(degree), values_(std::move(values)) {
  if (degree < 0 || values_.size() != monomial_count(degree))
    throw InputError("a degree-" + std::to_string(degree) + " moment sequence needs " +
                     std::to_string(monomial_count(degree)) + " values, got " +
                     std::to_string(values_.size()));
}

double MomentSequence::operator[](Monomial m) const {
  if (m.i < 0 || m.j < 0 || m.degree() > degree_)
    throw InputError("moment beta_" + exponent_key(m) + " is missing from a degree-" +
                     std::to_string(degree_) + " sequence");
  return values_[monomial_index(m)];
}

void MomentSequence::set(Monomial m, double value) {
  if (m.i < 0 || m.j < 0 || m.degree() > degree_)
    throw InputError("moment beta_" + exponent_key(m) + " exceeds sequence degree");
  values_[monomial_index(m)] = value;
}

MomentSequence MomentSequence::scaled(double factor) const {
  MomentSequence r = *this;
  for (double& v : r.values_) v *= factor;
  return r;
}

MomentSequence MomentSequence::truncated(int degree) const {
  if (degree > degree_) throw InputError("cannot truncate a sequence to a higher degree");
  return MomentSequence(degree, {values_.begin(), values_.begin() + monomial_count(degree)});
}

MomentSequence MomentSequence::operator+(const MomentSequence& o) const {
  if (o.degree_ != degree_) throw InputError("moment sequences of different degree");
  MomentSequence r = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) r.values_[k] += o.values_[k];
  return r;
}

double MomentSequence::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

MomentMatrix moment_matrix(const MomentSequence& beta, int order) {
  if (order < 0 || beta.degree() < 2 * order)
    throw InputError("M(" + std::to_string(order) + ") needs moments up to degree " +
                     std::to_string(2 * order));
  MomentMatrix m;
  m.order = order;
  m.labels = monomials_up_to(order);
  const auto n = static_cast<Eigen::Index>(m.labels.size());
  m.entries.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m.entries(r, c) = beta[m.labels[r] + m.labels[c]];
  return m;
}

double hankel_defect(const Eigen::MatrixXd& m, int order) {
  const auto labels = monomials_up_to(order);
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (m.rows() != n || m.cols() != n) throw InputError("matrix size does not match order");
  // First entry seen for each exponent sum is the reference value.
  std::vector<double> ref(monomial_count(2 * order), 0.0);
  std::vector<bool> seen(ref.size(), false);
  double defect = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const std::size_t k = monomial_index(labels[r] + labels[c]);
      if (!seen[k]) {
        seen[k] = true;
        ref[k] = m(r, c);
      } else {
        defect = std::max(defect, std::abs(m(r, c) - ref[k]));
      }
    }
  }
  return defect;
}

double riesz(const MomentSequence& beta, const Polynomial& p) {
  if (p.degree() > beta.degree())
    throw InputError("polynomial degree " + std::to_string(p.degree()) +
                     " exceeds moment degree " + std::to_string(beta.degree()));
  double total = 0.0;
  const auto coeffs = p.coefficients();
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0.0) total += coeffs[k] * beta[monomial_at(k)];
  return total;
}

double AtomicMeasure::mass() const noexcept {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.w;
  return m;
}

Eigen::VectorXd monomial_vector(double x, double y, int degree) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(monomial_count(degree)));
  Eigen::Index k = 0;
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j) v(k++) = std::pow(x, d - j) * std::pow(y, j);
  return v;
}

MomentSequence moments_of_measure(const AtomicMeasure& mu, int degree) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(monomial_count(degree)));
  for (const Atom& a : mu.atoms) acc += a.w * monomial_vector(a.x, a.y, degree);
  return MomentSequence(degree, std::vector<double>(acc.data(), acc.data() + acc.size()));
}

double matrix_scale(const Eigen::MatrixXd& m) {
  return std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
}

SpectralSummary psd_rank(const Eigen::MatrixXd& m, double rank_tol) {
  SpectralSummary s;
  if (m.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  s.eigenvalues = eig.eigenvalues();
  s.threshold = rank_tol * matrix_scale(m);
  s.min_eigenvalue = s.eigenvalues(0);
  s.is_psd = s.min_eigenvalue >= -s.threshold;
  s.rank = static_cast<int>((s.eigenvalues.array() > s.threshold).count());
  return s;
}

VerificationReport verify_measure(const MomentSequence& beta, const AtomicMeasure& mu, double tol,
                                  double weight_tol) {
  VerificationReport rep;
  const MomentSequence hat = moments_of_measure(mu, beta.degree());
  for (std::size_t k = 0; k < beta.size(); ++k)
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(beta.values()[k] - hat.values()[k]));
  const double scale = beta.max_abs();
  rep.max_rel_residual = scale > 0.0 ? rep.max_abs_residual / scale : rep.max_abs_residual;
  rep.atom_count = static_cast<int>(mu.size());
  const double floor = weight_tol * std::max(std::abs(beta.get(0, 0)), 0.0);
  rep.positive_weights = std::all_of(mu.atoms.begin(), mu.atoms.end(),
                                     [floor](const Atom& a) { return a.w > floor; });
  if (beta.degree() >= 4) {
    const MomentMatrix m2 = moment_matrix(moments_of_measure(mu, 4), 2);
    rep.psd_margin = psd_rank(m2.entries, 0.0).min_eigenvalue;
  }
  rep.success = rep.positive_weights && rep.max_rel_residual <= tol;
  return rep;
}

}  // namespace qmp
