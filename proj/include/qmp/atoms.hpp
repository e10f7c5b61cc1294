#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmp/extension.hpp"
#include "qmp/moments.hpp"
#include "qmp/options.hpp"

namespace qmp {

/// Multiplication by x and by y on the column space of a flat M(3), in the given basis of
/// degree <= 2 monomials. Column m of mx holds the coefficients of X*m in the basis.
struct MultiplicationPair {
  Eigen::MatrixXd mx;
  Eigen::MatrixXd my;
  std::vector<Monomial> basis;

  /// ||Mx My - My Mx|| / (||Mx|| ||My||)
  double commutator() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

MultiplicationPair multiplication_matrices(const MomentMatrix& m3, const std::vector<Monomial>& basis,
                                           double rank_tol = 1e-9);

/// Joint eigenvectors of the pair via N(t) = Mx^T + t My^T for a sequence of fixed t.
std::vector<Point> extract_atoms(const MultiplicationPair& pair, double tol = 1e-7);

std::vector<double> solve_weights(std::span<const Point> points, const MomentSequence& beta,
                                  const std::vector<Monomial>& basis, double weight_tol = 1e-10);

/// Degree <= 2 monomials minus `pivot` (when given).
std::vector<Monomial> quadratic_basis(std::optional<Monomial> pivot = std::nullopt);

/// Multiplication matrices, atoms and weights in one pass.
AtomicMeasure recover_measure(const FlatExtension& ext, const std::vector<Monomial>& basis,
                              const Tolerances& tol = {});

}  // namespace qmp
