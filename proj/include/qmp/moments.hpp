#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmp/monomial.hpp"
#include "qmp/polynomial.hpp"

namespace qmp {

/// The moments beta_ij for all i + j <= degree, stored in graded lexicographic order.
class MomentSequence {
 public:
  explicit MomentSequence(int degree = 4);
  MomentSequence(int degree, std::vector<double> values);

  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](Monomial m) const;
  double get(int i, int j) const { return (*this)[{i, j}]; }
  void set(Monomial m, double value);
  void set(int i, int j, double value) { set({i, j}, value); }

  std::span<const double> values() const noexcept { return values_; }

  MomentSequence scaled(double factor) const;
  MomentSequence truncated(int degree) const;
  /// Entrywise sum; both sequences must share a degree.
  MomentSequence operator+(const MomentSequence& o) const;

  /// Largest absolute moment.
  double max_abs() const noexcept;

 private:
  int degree_;
  std::vector<double> values_;
};

/// Generalized Hankel matrix M(n) with entry (u, v) = beta_{u+v}, rows and columns labeled
/// by the monomials of degree <= n in graded lexicographic order.
struct MomentMatrix {
  int order = 0;
  Eigen::MatrixXd entries;
  std::vector<Monomial> labels;

  Eigen::Index size() const noexcept { return entries.rows(); }
};

MomentMatrix moment_matrix(const MomentSequence& beta, int order);

/// Largest |M(u,v) - M(u',v')| over label pairs with u+v = u'+v'.
double hankel_defect(const Eigen::MatrixXd& m, int order);

/// Riesz functional: sum_ij p_ij beta_ij.
double riesz(const MomentSequence& beta, const Polynomial& p);

struct Atom {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;

  std::size_t size() const noexcept { return atoms.size(); }
  double mass() const noexcept;
};

MomentSequence moments_of_measure(const AtomicMeasure& mu, int degree);

/// Vector (m(x, y)) over the monomials of degree <= degree.
Eigen::VectorXd monomial_vector(double x, double y, int degree);

struct SpectralSummary {
  bool is_psd = false;
  int rank = 0;
  double min_eigenvalue = 0.0;
  /// rank_tol * max(1, ||M||_inf), the cut used for both rank and PSD decisions.
  double threshold = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending
};

SpectralSummary psd_rank(const Eigen::MatrixXd& m, double rank_tol);

/// max(1, ||M||_inf)
double matrix_scale(const Eigen::MatrixXd& m);

struct VerificationReport {
  double max_abs_residual = 0.0;
  /// max |beta - beta_hat| divided by max |beta|.
  double max_rel_residual = 0.0;
  /// Smallest eigenvalue of M(2) rebuilt from the measure.
  double psd_margin = 0.0;
  int atom_count = 0;
  bool positive_weights = false;
  bool success = false;
  std::string branch;
};

VerificationReport verify_measure(const MomentSequence& beta, const AtomicMeasure& mu, double tol,
                                  double weight_tol = 1e-10);

}  // namespace qmp
