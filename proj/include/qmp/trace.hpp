#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmp/conic.hpp"

namespace qmp {

enum class Branch {
  GenericConic,          // rank-5 remainder on a parabola, hyperbola or ellipse
  LinesKappaLambda,      // intersecting lines, kappa != 0 and lambda != 0
  LinesKappaZero,        // kappa = 0, lambda != 0
  LinesLambdaZero,       // kappa != 0, lambda = 0
  LinesDoubleReduction,  // kappa = lambda = 0, second remainder on a hyperbola
  LinesCeqA,             // kappa = lambda = 0 and c = a
  LinesDeqB,             // kappa = lambda = 0 and d = b
};

std::string_view to_string(Branch b);

/// Working-matrix entries of the line-pair normal form, M(2) = M^(2) + u v v^T with
/// v the monomial vector of (1, 1).
struct LineParameters {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, g = 0, h = 0, u = 0;
};

/// Everything the solver decided on the way to a measure. Fields stay empty when the
/// branch that defines them was not taken.
struct CaseTrace {
  std::optional<Branch> branch;
  std::optional<ConicType> conic;
  std::optional<double> u0;

  std::optional<LineParameters> parameters;
  std::optional<double> structure_residual;
  std::optional<double> e1_e3_residual;
  std::optional<double> kappa, lambda, mu, nu;
  std::optional<double> k, k_closed_form;
  std::optional<double> xi, eta, theta;
  std::optional<double> discriminant;         // of the quadratic in beta41
  std::optional<double> f_value;              // F1 (c = a) or F2 (d = b)
  std::optional<double> branch_discriminant;  // Delta1 or Delta2
  std::optional<double> beta50, beta05, beta41;
  std::optional<double> p, q;                 // distinguished atom before rescaling
  std::optional<double> distinguished_weight;

  std::optional<double> hankel_residual;
  std::optional<int> newton_starts;
  std::vector<std::string> notes;
};

}  // namespace qmp
