#include "qmp/extension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <memory>
#include <string>
#include <tuple>

#include "qmp/atoms.hpp"
#include "qmp/error.hpp"
#include "qmp/rank_reduction.hpp"
#include "qmp/transforms.hpp"

namespace qmp {

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::GenericConic: return "GenericConic";
    case Branch::LinesKappaLambda: return "LinesKappaLambda";
    case Branch::LinesKappaZero: return "LinesKappaZero";
    case Branch::LinesLambdaZero: return "LinesLambdaZero";
    case Branch::LinesDoubleReduction: return "LinesDoubleReduction";
    case Branch::LinesCeqA: return "LinesCeqA";
    case Branch::LinesDeqB: return "LinesDeqB";
  }
  return "?";
}

namespace {

constexpr std::array<Monomial, 4> kCubic = {Monomial{3, 0}, Monomial{2, 1}, Monomial{1, 2}, Monomial{0, 3}};

double block_scale(const Eigen::MatrixXd& c) { return std::max(1.0, c.cwiseAbs().maxCoeff()); }

[[noreturn]] void fail(const std::string& what, const CaseTrace& trace) {
  throw NumericalFailure(what, std::make_shared<const CaseTrace>(trace));
}

}  // namespace

Quintic quintic_of(const MomentSequence& beta) {
  return {beta.get(5, 0), beta.get(4, 1), beta.get(3, 2), beta.get(2, 3), beta.get(1, 4), beta.get(0, 5)};
}

Eigen::MatrixXd build_b3(const MomentSequence& beta, const Quintic& quintic) {
  const auto rows = monomials_up_to(2);
  Eigen::MatrixXd b(6, 4);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 4; ++c) {
      const Monomial m = rows[r] + kCubic[c];
      b(r, c) = m.degree() == 5 ? quintic[m.j] : beta[m];
    }
  }
  return b;
}

ExtensionBlocks smuljan_extend(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b, double rank_tol) {
  if (m.rows() != b.rows()) throw PreconditionError("B(3) rows do not match M(2)");
  ExtensionBlocks out;
  out.b = b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const double thr = rank_tol * matrix_scale(m);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  if ((lam.array() > thr).all()) {
    out.w = m.partialPivLu().solve(b);
  } else {
    const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const Eigen::VectorXd v = eig.eigenvectors().col(k);
      if (lam(k) > thr) {
        pinv += v * v.transpose() / lam(k);
      } else if ((v.transpose() * b).cwiseAbs().maxCoeff() > 1e-9 * bscale) {
        throw NumericalFailure("flat extension infeasible: B(3) is not in the range of M(2)");
      }
    }
    out.w = pinv * b;
  }
  out.c = out.w.transpose() * m * out.w;
  return out;
}

double HankelResiduals::max_abs() const noexcept {
  return std::max({std::abs(e1), std::abs(e2), std::abs(e3)});
}

HankelResiduals hankel_residuals(const Eigen::MatrixXd& c) {
  if (c.rows() != 4 || c.cols() != 4) throw PreconditionError("C(3) must be 4x4");
  return {c(0, 2) - c(1, 1), c(0, 3) - c(1, 2), c(1, 3) - c(2, 2)};
}

FlatExtension assemble_extension(const MomentSequence& beta, const ExtensionBlocks& blocks, double rank_tol) {
  const MomentMatrix m2 = moment_matrix(beta, 2);
  Eigen::MatrixXd raw(10, 10);
  raw << m2.entries, blocks.b, blocks.b.transpose(), blocks.c;

  MomentSequence moments(6);
  for (const Monomial m : monomials_up_to(4)) moments.set(m, beta[m]);
  for (int j = 0; j <= 5; ++j) moments.set(5 - j, j, blocks.quintic[j]);
  std::array<double, 7> sum{};
  std::array<int, 7> count{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int j = kCubic[r].j + kCubic[c].j;
      sum[j] += blocks.c(r, c);
      ++count[j];
    }
  }
  for (int j = 0; j <= 6; ++j) moments.set(6 - j, j, sum[j] / count[j]);

  FlatExtension ext;
  ext.hankel_defect = hankel_defect(raw, 3);
  ext.moments = moments;
  ext.m3 = moment_matrix(moments, 3);
  ext.rank = psd_rank(ext.m3.entries, rank_tol).rank;
  return ext;
}

FlatExtension extension_from_moments(const MomentSequence& moments6, double rank_tol) {
  FlatExtension ext;
  ext.moments = moments6;
  ext.m3 = moment_matrix(moments6, 3);
  ext.rank = psd_rank(ext.m3.entries, rank_tol).rank;
  return ext;
}

// ---------------------------------------------------------------------------------------
// Rank-5 flat extension on a nondegenerate conic.

namespace {

// E_i(t) = e0_i + g_i . t + t^T H_i t / 2 over the free quintic parameters.
struct QuadraticModel {
  Eigen::Vector3d e0;
  Eigen::MatrixXd g;                   // 3 x k
  std::array<Eigen::MatrixXd, 3> hess;  // k x k each

  Eigen::Vector3d value(const Eigen::VectorXd& t) const {
    Eigen::Vector3d v = e0 + g * t;
    for (int i = 0; i < 3; ++i) v(i) += 0.5 * t.dot(hess[i] * t);
    return v;
  }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& t) const {
    Eigen::MatrixXd j = g;
    for (int i = 0; i < 3; ++i) j.row(i) += (hess[i] * t).transpose();
    return j;
  }
};

struct Rank5Problem {
  const MomentSequence& reduced;
  Eigen::MatrixXd pinv;
  Eigen::VectorXd z0;
  Eigen::MatrixXd null;  // 6 x k

  Quintic quintic(const Eigen::VectorXd& t) const {
    const Eigen::VectorXd z = z0 + null * t;
    return {z(0), z(1), z(2), z(3), z(4), z(5)};
  }
  // Hankel residuals and the scale of C at t.
  std::pair<Eigen::Vector3d, double> residual(const Eigen::VectorXd& t) const {
    const Eigen::MatrixXd b = build_b3(reduced, quintic(t));
    const Eigen::MatrixXd c = b.transpose() * pinv * b;
    const HankelResiduals e = hankel_residuals(c);
    return {Eigen::Vector3d(e.e1, e.e2, e.e3), block_scale(c)};
  }
};

QuadraticModel fit_model(const Rank5Problem& prob, double h) {
  const auto k = prob.null.cols();
  QuadraticModel model;
  model.g.resize(3, k);
  for (auto& m : model.hess) m = Eigen::MatrixXd::Zero(k, k);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
  model.e0 = prob.residual(zero).first;
  std::vector<Eigen::Vector3d> plus(k), minus(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd t = zero;
    t(j) = h;
    plus[j] = prob.residual(t).first;
    t(j) = -h;
    minus[j] = prob.residual(t).first;
    model.g.col(j) = (plus[j] - minus[j]) / (2 * h);
    const Eigen::Vector3d curv = (plus[j] + minus[j] - 2 * model.e0) / (h * h);
    for (int i = 0; i < 3; ++i) model.hess[i](j, j) = curv(i);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = j + 1; l < k; ++l) {
      Eigen::VectorXd t = zero;
      t(j) = h;
      t(l) = h;
      const Eigen::Vector3d mixed = (prob.residual(t).first - plus[j] - plus[l] + model.e0) / (h * h);
      for (int i = 0; i < 3; ++i) model.hess[i](j, l) = model.hess[i](l, j) = mixed(i);
    }
  }
  return model;
}

// Levenberg-Marquardt on the quadratic model.
std::pair<Eigen::VectorXd, double> levenberg_marquardt(const QuadraticModel& model, Eigen::VectorXd t,
                                                       double target) {
  Eigen::Vector3d e = model.value(t);
  double mu = -1.0;
  for (int it = 0; it < 200 && e.norm() > target; ++it) {
    const Eigen::MatrixXd j = model.jacobian(t);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    if (mu < 0) mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
    const Eigen::VectorXd grad = j.transpose() * e;
    bool improved = false;
    for (int inner = 0; inner < 30 && !improved; ++inner) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu;
      const Eigen::VectorXd step = -lhs.ldlt().solve(grad);
      const Eigen::Vector3d trial = model.value(t + step);
      if (trial.norm() < e.norm()) {
        t += step;
        e = trial;
        mu = std::max(mu / 3.0, 1e-300);
        improved = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }
  return {t, e.norm()};
}

}  // namespace

Rank5Solution solve_rank5_extension(const MomentSequence& reduced, const ConicRelation& relation,
                                    const Tolerances& tol) {
  const ConicClass cls = classify(relation, tol.conic);
  if (cls.type != ConicType::Parabola && cls.type != ConicType::NondegenerateHyperbola &&
      cls.type != ConicType::EllipseOrCircle)
    throw PreconditionError("rank-5 extension needs a parabola, hyperbola or ellipse relation");

  const MomentMatrix mm = moment_matrix(reduced, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mm.entries);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  double thr = tol.rank * matrix_scale(mm.entries);
  if ((lam.array() > thr).count() != 5) thr *= 10.0;
  if ((lam.array() > thr).count() != 5 || lam(0) < -thr)
    throw PreconditionError("rank-5 extension needs a PSD M(2) of rank 5");

  const Eigen::VectorXd n = eig.eigenvectors().col(0);
  Eigen::Map<const Eigen::VectorXd> rel(relation.coefficients.data(), 6);
  if (std::abs(n.dot(rel)) < 1.0 - 1e-6)
    throw PreconditionError("the given relation is not the kernel of M(2)");

  Rank5Problem prob{reduced, Eigen::MatrixXd::Zero(6, 6), {}, {}};
  for (Eigen::Index k = 1; k < 6; ++k) {
    const Eigen::VectorXd v = eig.eigenvectors().col(k);
    prob.pinv += v * v.transpose() / lam(k);
  }

  // Range condition n^T B(3) = 0: four affine constraints on the quintic moments.
  const auto rows = monomials_up_to(2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 6);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4);
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 6; ++r) {
      const Monomial m = rows[r] + kCubic[c];
      if (m.degree() == 5) {
        a(c, m.j) += n(r);
      } else {
        rhs(c) -= n(r) * reduced[m];
      }
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index rank_a = 0;
  while (rank_a < sv.size() && sv(rank_a) > 1e-12 * sv(0)) ++rank_a;
  prob.z0 = svd.solve(rhs);
  if ((a * prob.z0 - rhs).norm() > 1e-9 * (1.0 + rhs.norm()))
    throw NumericalFailure("range condition for B(3) is inconsistent; M(2) is not recursively generated");
  const Eigen::Index free = 6 - rank_a;
  if (free > 3) throw NumericalFailure("range condition leaves too many free quintic moments");
  prob.null = svd.matrixV().rightCols(free);

  const double h = std::max(1.0, reduced.max_abs());
  const QuadraticModel model = fit_model(prob, h);
  {
    Eigen::VectorXd tv(free);
    const double probe[3] = {0.37, -0.61, 0.23};
    for (Eigen::Index j = 0; j < free; ++j) tv(j) = probe[j] * h;
    const auto [actual, cscale] = prob.residual(tv);
    if ((model.value(tv) - actual).cwiseAbs().maxCoeff() > 1e-7 * cscale)
      throw NumericalFailure("Hankel residuals are not quadratic in the free quintic moments");
  }

  // Multi-start over a grid of the free parameters.
  struct Candidate {
    double residual;
    std::size_t order;
    Eigen::VectorXd t;
  };
  std::vector<Candidate> cands;
  const int grid[5] = {0, -1, 1, -2, 2};
  const std::size_t total = free == 0 ? 1 : static_cast<std::size_t>(std::pow(5, free));
  for (std::size_t s = 0; s < total; ++s) {
    Eigen::VectorXd t0(free);
    std::size_t code = s;
    for (Eigen::Index j = 0; j < free; ++j) {
      t0(j) = grid[code % 5] * h;
      code /= 5;
    }
    auto [t, res] = levenberg_marquardt(model, t0, 1e-15 * h * h);
    cands.push_back({res, s, std::move(t)});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.residual, x.order) < std::tie(y.residual, y.order);
  });

  const std::optional<Monomial> pivot = [&] {
    Eigen::Index best = 3;
    for (Eigen::Index k = 4; k < 6; ++k)
      if (std::abs(n(k)) > std::abs(n(best))) best = k;
    return std::optional<Monomial>(rows[best]);
  }();
  const std::vector<Monomial> basis = quadratic_basis(pivot);

  const double pscale = Eigen::Map<const Eigen::VectorXd>(relation.coefficients.data(), 6).norm();
  const double mass = reduced.get(0, 0);
  Tolerances no_floor = tol;
  no_floor.weight = -std::numeric_limits<double>::infinity();

  // Gauss-Newton on the evaluated residuals with the model Jacobian. Pseudo-inverse steps move
  // orthogonally onto the solution set.
  auto correct = [&](Eigen::VectorXd& t, double target, int& iters) {
    auto [e, cscale] = prob.residual(t);
    for (iters = 0; iters < 8 && e.cwiseAbs().maxCoeff() > target * cscale; ++iters) {
      const Eigen::JacobiSVD<Eigen::MatrixXd> js(model.jacobian(t), Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd sv = js.singularValues();
      Eigen::VectorXd step = Eigen::VectorXd::Zero(t.size());
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > 1e-8 * sv(0)) step += js.matrixV().col(k) * (js.matrixU().col(k).dot(e) / sv(k));
      t -= step;
      std::tie(e, cscale) = prob.residual(t);
    }
    return e.cwiseAbs().maxCoeff() <= 1e-9 * cscale;
  };

  struct CurvePoint {
    Eigen::VectorXd t;
    Rank5Solution sol;
    double quality = -std::numeric_limits<double>::infinity();  // smallest weight / mass
  };
  std::string last_error = "no start converged";
  auto evaluate = [&](const Eigen::VectorXd& t) -> std::optional<CurvePoint> {
    try {
      const Quintic q = prob.quintic(t);
      ExtensionBlocks blocks = smuljan_extend(mm.entries, build_b3(reduced, q), thr / matrix_scale(mm.entries));
      blocks.quintic = q;
      FlatExtension ext = assemble_extension(reduced, blocks, tol.rank);
      if (ext.rank != 5) throw NumericalFailure("extension has rank " + std::to_string(ext.rank));
      AtomicMeasure mu = recover_measure(ext, basis, no_floor);
      for (const Atom& at : mu.atoms)
        if (std::abs(relation(at.x, at.y)) > 1e-7 * pscale * std::max(1.0, at.x * at.x + at.y * at.y))
          throw NumericalFailure("extracted atom is off the conic");
      CurvePoint pt;
      pt.t = t;
      pt.quality = std::numeric_limits<double>::infinity();
      for (const Atom& at : mu.atoms) pt.quality = std::min(pt.quality, at.w / mass);
      pt.sol.extension = std::move(ext);
      pt.sol.measure = std::move(mu);
      pt.sol.quintic = q;
      pt.sol.hankel_residual = hankel_residuals(blocks.c).max_abs() / block_scale(blocks.c);
      return pt;
    } catch (const NumericalFailure& err) {
      last_error = err.what();
      return std::nullopt;
    }
  };

  // With two free moments the flat extensions form curves, one end of which sends an atom to
  // infinity with vanishing weight. Walk each curve both ways and keep the heaviest lightest atom.
  std::vector<Eigen::VectorXd> visited;
  auto on_visited = [&](const Eigen::VectorXd& t) {
    return std::any_of(visited.begin(), visited.end(),
                       [&](const Eigen::VectorXd& o) { return (o - t).norm() <= 0.02 * h; });
  };
  // The lightest weight can peak sharply between two samples. Golden section on the path
  // through the neighbours of the best sample, corrected back onto the curve.
  auto refine = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& mid, const Eigen::VectorXd& b,
                    CurvePoint& best) {
    auto at = [&](double s) {
      Eigen::VectorXd u = s < 0 ? mid + (-s) * (a - mid) : mid + s * (b - mid);
      int iters = 0;
      if (!correct(u, 1e-12, iters)) return -std::numeric_limits<double>::infinity();
      std::optional<CurvePoint> pt = evaluate(u);
      if (!pt) return -std::numeric_limits<double>::infinity();
      const double q = pt->quality;
      if (q > best.quality) best = std::move(*pt);
      return q;
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = -1.0, hi = 1.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 >= f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - g * (hi - lo), f1 = at(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + g * (hi - lo), f2 = at(x2);
      }
    }
  };
  auto walk = [&](const CurvePoint& seed, CurvePoint& best) {
    for (const double dir : {1.0, -1.0}) {
      Eigen::VectorXd t = seed.t;
      Eigen::VectorXd prev_tau;
      std::vector<Eigen::VectorXd> path{t};
      std::vector<double> quality{seed.quality};
      double ds = 0.05 * h;
      for (int step = 0; step < 120; ++step) {
        const Eigen::JacobiSVD<Eigen::MatrixXd> js(model.jacobian(t), Eigen::ComputeFullV);
        Eigen::VectorXd tau = js.matrixV().col(free - 1);
        if (prev_tau.size() == 0 ? dir < 0 : tau.dot(prev_tau) < 0) tau = -tau;
        Eigen::VectorXd next;
        int iters = 0;
        bool moved = false;
        while (!moved && ds > 1e-6 * h) {
          next = t + ds * tau;
          moved = correct(next, 1e-12, iters) && (next - t).norm() < 2 * ds;
          if (!moved) ds *= 0.5;
        }
        if (!moved) break;
        // Sample the segment so later seeds on this curve are recognized.
        for (int k = 1; k <= 8; ++k) visited.push_back(t + (next - t) * (k / 8.0));
        prev_tau = (next - t).normalized();
        t = next;
        std::optional<CurvePoint> pt = evaluate(t);
        path.push_back(t);
        quality.push_back(pt ? pt->quality : -std::numeric_limits<double>::infinity());
        if (pt && pt->quality > best.quality) best = std::move(*pt);
        if (iters <= 3) ds = std::min(1.5 * ds, 2.0 * h);
        if (step > 2 && (t - seed.t).norm() < ds) break;  // closed curve
        if (t.norm() > 1e4 * h) break;
      }
      const auto k = static_cast<std::size_t>(std::max_element(quality.begin(), quality.end()) - quality.begin());
      if (path.size() > 1)
        refine(path[k == 0 ? 0 : k - 1], path[k], path[std::min(k + 1, path.size() - 1)], best);
    }
  };

  std::optional<CurvePoint> found;
  CurvePoint best;
  int attempts = 0;
  // Further seeds only while every point found sits next to the degenerate end of a curve.
  constexpr double kSettled = 1e-6;
  for (const Candidate& cand : cands) {
    if (found && best.quality > kSettled) break;
    Eigen::VectorXd t = cand.t;
    int iters = 0;
    if (!correct(t, 1e-13, iters) || on_visited(t)) continue;
    visited.push_back(t);
    ++attempts;
    std::optional<CurvePoint> seed = evaluate(t);
    if (!seed) continue;
    if (!found || seed->quality > best.quality) best = *seed;
    found = seed;
    if (free != 2) break;
    walk(*seed, best);
  }
  if (!found) throw NumericalFailure("rank-5 flat extension not found: " + last_error);
  if (!(best.quality > tol.weight))
    throw NumericalFailure("rank-5 flat extension not found: lightest atom weight " +
                           format_number(best.quality * mass) + " is not positive");
  best.sol.starts_tried = attempts;
  return best.sol;
}

// ---------------------------------------------------------------------------------------
// Pair of intersecting lines.

MomentSequence line_pair_moments(const LineParameters& p) {
  const double u = p.u;
  return MomentSequence(4, {1 + u, p.a + u, p.b + u, p.c + u, u, p.d + u, p.e + u, u, u, p.f + u, p.g + u, u,
                            u, u, p.h + u});
}

namespace {

LineParameters read_parameters(const MomentSequence& w) {
  LineParameters p;
  p.u = w.get(2, 2);
  p.a = w.get(1, 0) - p.u;
  p.b = w.get(0, 1) - p.u;
  p.c = w.get(2, 0) - p.u;
  p.d = w.get(0, 2) - p.u;
  p.e = w.get(3, 0) - p.u;
  p.f = w.get(0, 3) - p.u;
  p.g = w.get(4, 0) - p.u;
  p.h = w.get(0, 4) - p.u;
  return p;
}

// Root of a residual that is affine in one unknown. The slope comes from two evaluations and
// a third evaluation confirms affinity. Returns nullopt when the slope vanishes.
std::optional<double> affine_root(const std::function<double(double)>& f, double h, double scale,
                                  const char* what, const CaseTrace& trace) {
  const double f0 = f(0.0), f1 = f(h);
  const double slope = (f1 - f0) / h;
  const double fm = f(-h);
  if (std::abs(fm - (f0 - slope * h)) > 1e-7 * std::max({scale, std::abs(f0), std::abs(f1)}))
    fail(std::string(what) + " is not affine in its unknown", trace);
  if (std::abs(slope) * h <= 1e-12 * std::max({scale, std::abs(f0), std::abs(f1)})) return std::nullopt;
  return -f0 / slope;
}

struct LineSystem {
  MomentSequence ideal;
  Eigen::MatrixXd m;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  explicit LineSystem(const LineParameters& p)
      : ideal(line_pair_moments(p)), m(moment_matrix(ideal, 2).entries), lu(m) {}

  std::pair<HankelResiduals, double> residual(const Quintic& q) const {
    const Eigen::MatrixXd b = build_b3(ideal, q);
    const Eigen::MatrixXd c = b.transpose() * lu.solve(b);
    return {hankel_residuals(c), block_scale(c)};
  }
};

FlatExtension finish_lines(const LineSystem& sys, const Quintic& q, CaseTrace& trace, const Tolerances& tol) {
  ExtensionBlocks blocks = smuljan_extend(sys.m, build_b3(sys.ideal, q), tol.rank);
  blocks.quintic = q;
  trace.beta50 = q[0];
  trace.beta41 = q[1];
  trace.beta05 = q[5];
  const double res = hankel_residuals(blocks.c).max_abs() / block_scale(blocks.c);
  trace.hankel_residual = res;
  if (res > 1e-9) fail("C(3) is not Hankel after the line-pair construction", trace);
  FlatExtension ext = assemble_extension(sys.ideal, blocks, tol.rank);
  if (ext.rank != 6) fail("line-pair extension has rank " + std::to_string(ext.rank) + ", expected 6", trace);
  return ext;
}

double smaller_root(double a2, double a1, double a0) {
  const double disc = a1 * a1 - 4 * a2 * a0;
  const double sq = std::sqrt(std::max(disc, 0.0));
  const double qq = -0.5 * (a1 + (a1 >= 0 ? sq : -sq));
  const double r1 = qq / a2;
  const double r2 = qq != 0.0 ? a0 / qq : r1;
  if (std::abs(r1) != std::abs(r2)) return std::abs(r1) < std::abs(r2) ? r1 : r2;
  return std::min(r1, r2);
}

double lightest_weight(const LineSystem& sys, const Quintic& q, const Tolerances& tol) {
  Tolerances no_floor = tol;
  no_floor.weight = -std::numeric_limits<double>::infinity();
  try {
    ExtensionBlocks blocks = smuljan_extend(sys.m, build_b3(sys.ideal, q), tol.rank);
    blocks.quintic = q;
    if (hankel_residuals(blocks.c).max_abs() > 1e-9 * block_scale(blocks.c)) return -1.0;
    const FlatExtension ext = assemble_extension(sys.ideal, blocks, tol.rank);
    if (ext.rank != 6) return -1.0;
    const AtomicMeasure mu = recover_measure(ext, quadratic_basis(), no_floor);
    double w = std::numeric_limits<double>::infinity();
    for (const Atom& a : mu.atoms) w = std::min(w, a.w / sys.ideal.get(0, 0));
    return w;
  } catch (const NumericalFailure&) {
    return -1.0;
  }
}

// Minimizes tr C(3) = tr(B^T M^-1 B) over q0 + sum_i s_i dirs_i. The trace is the sixth-order
// mass of the measure, so the minimizer keeps the free atoms close in.
Quintic min_trace(const LineSystem& sys, const Quintic& q0, const std::vector<Quintic>& dirs) {
  const Eigen::MatrixXd b0 = build_b3(sys.ideal, q0);
  const auto k = static_cast<Eigen::Index>(dirs.size());
  std::vector<Eigen::MatrixXd> d(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Quintic q1 = q0;
    for (int j = 0; j < 6; ++j) q1[j] += dirs[i][j];
    d[i] = build_b3(sys.ideal, q1) - b0;
  }
  Eigen::MatrixXd g(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::MatrixXd mi = sys.lu.solve(d[i]);
    rhs(i) = -(mi.transpose() * b0).trace();
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = (mi.transpose() * d[j]).trace();
  }
  const Eigen::VectorXd sol = g.ldlt().solve(rhs);
  Quintic q = q0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (int j = 0; j < 6; ++j) q[j] += sol(i) * dirs[i][j];
  return q;
}

}  // namespace

FlatExtension solve_pair_of_lines(const MomentSequence& working, CaseTrace& trace, const Tolerances& tol) {
  LineParameters p = read_parameters(working);
  trace.parameters = p;
  trace.distinguished_weight = p.u;
  {
    const MomentSequence ideal = line_pair_moments(p);
    double dev = 0.0;
    for (std::size_t k = 0; k < ideal.size(); ++k)
      dev = std::max(dev, std::abs(ideal.values()[k] - working.values()[k]));
    trace.structure_residual = dev / std::max(1.0, working.max_abs());
    if (*trace.structure_residual > 1e-6) fail("working matrix is not in line-pair normal form", trace);
  }
  if (!(p.u > 0)) fail("distinguished atom weight is not positive", trace);

  LineSystem sys(p);
  if (psd_rank(sys.m, tol.rank).rank != 6) fail("line-pair M(2) is not invertible", trace);
  const double h = std::max(1.0, sys.ideal.max_abs());
  const double u = p.u;

  // Step 1: with beta41 = beta32 = beta23 = beta14 = u, E1 and E3 vanish identically.
  auto first_block = [u](double b50, double b05) { return Quintic{b50, u, u, u, u, b05}; };
  {
    double worst = 0.0;
    for (const auto& [x, y] : {std::pair{0.0, 0.0}, std::pair{h, -h}}) {
      const auto [e, cs] = sys.residual(first_block(x, y));
      worst = std::max({worst, std::abs(e.e1) / cs, std::abs(e.e3) / cs});
    }
    trace.e1_e3_residual = worst;
    if (worst > 1e-9) fail("E1 and E3 do not vanish for the first B(3) block", trace);
  }

  // Step 2.
  const double kappa = p.c * p.c - p.a * p.e;
  const double lambda = p.d * p.d - p.b * p.f;
  trace.kappa = kappa;
  trace.lambda = lambda;
  trace.mu = p.f * p.f * p.f - 2 * p.d * p.f * p.h + p.b * p.h * p.h - p.d * p.d * u + p.b * p.f * u;
  trace.nu = p.e * p.e * p.e - 2 * p.c * p.e * p.g + p.a * p.g * p.g - p.c * p.c * u + p.a * p.e * u;
  const bool kappa_zero = std::abs(kappa) <= tol.conic * std::max({p.c * p.c, std::abs(p.a * p.e), 1e-300});
  const bool lambda_zero = std::abs(lambda) <= tol.conic * std::max({p.d * p.d, std::abs(p.b * p.f), 1e-300});

  // Steps 3 and 4: E2 is affine in whichever unknown is solved for. The other one is free
  // and chosen by min_trace.
  if (!kappa_zero || !lambda_zero) {
    const double cscale = sys.residual(first_block(0, 0)).second;
    const Quintic along50{1, 0, 0, 0, 0, 0}, along05{0, 0, 0, 0, 0, 1};
    auto root_05 = [&](double b50) {
      return affine_root([&](double x) { return sys.residual(first_block(b50, x)).first.e2; }, h, cscale, "E2",
                         trace);
    };
    auto root_50 = [&](double b05) {
      return affine_root([&](double x) { return sys.residual(first_block(x, b05)).first.e2; }, h, cscale, "E2",
                         trace);
    };
    std::vector<Quintic> options;
    if (!kappa_zero && !lambda_zero) {
      trace.branch = Branch::LinesKappaLambda;
      // E2 vanishes on beta05 = -mu/lambda for every beta50 and on beta50 = -nu/kappa for every beta05.
      std::optional<double> r05 = root_05(0.0);
      if (!r05) r05 = root_05(1.0);
      std::optional<double> r50 = root_50(0.0);
      if (!r50) r50 = root_50(1.0);
      if (r05) options.push_back(min_trace(sys, first_block(0.0, *r05), {along50}));
      if (r50) options.push_back(min_trace(sys, first_block(*r50, 0.0), {along05}));
    } else if (kappa_zero) {
      trace.branch = Branch::LinesKappaZero;
      const std::optional<double> r05 = root_05(0.0);
      options.push_back(r05 ? min_trace(sys, first_block(0.0, *r05), {along50})
                            : min_trace(sys, first_block(0.0, 0.0), {along50, along05}));
    } else {
      trace.branch = Branch::LinesLambdaZero;
      const std::optional<double> r50 = root_50(0.0);
      options.push_back(r50 ? min_trace(sys, first_block(*r50, 0.0), {along05})
                            : min_trace(sys, first_block(0.0, 0.0), {along50, along05}));
    }
    if (options.empty()) fail("E2 has no root in beta50 or beta05", trace);
    std::size_t pick = 0;
    double best = lightest_weight(sys, options[0], tol);
    for (std::size_t i = 1; i < options.size(); ++i) {
      const double w = lightest_weight(sys, options[i], tol);
      if (w > best) pick = i, best = w;
    }
    return finish_lines(sys, options[pick], trace, tol);
  }

  // Step 5: kappa = lambda = 0.
  if (!(p.a != 0 && p.b != 0 && p.c > 0 && p.d > 0))
    fail("kappa = lambda = 0 needs a, b nonzero and c, d positive", trace);
  p.e = p.c * p.c / p.a;
  p.f = p.d * p.d / p.b;
  trace.parameters = p;
  sys = LineSystem(p);
  const double k = qmp::u0(sys.m);
  trace.k = k;
  trace.k_closed_form = (-p.b * p.b * p.c - p.a * p.a * p.d + p.c * p.d) / (p.c * p.d);
  if (std::abs(k - *trace.k_closed_form) > 1e-8 * std::max(1.0, std::abs(k)))
    fail("det M(2) / det M(2)_{2..6} disagrees with its closed form", trace);
  const double den = -p.b * p.c - p.a * p.d + p.c * p.d;
  trace.xi = p.c * p.d / den;
  trace.eta = p.a * p.d / den;
  trace.theta = p.b * p.c / den;

  const bool c_eq_a = std::abs(p.c - p.a) <= tol.conic * std::max(std::abs(p.a), std::abs(p.c));
  const bool d_eq_b = std::abs(p.d - p.b) <= tol.conic * std::max(std::abs(p.b), std::abs(p.d));

  if (!c_eq_a && !d_eq_b) {
    // XY = xi - eta X - theta Y is a nondegenerate hyperbola: extend the rank-5 remainder.
    trace.branch = Branch::LinesDoubleReduction;
    MomentSequence rest = sys.ideal;
    rest.set(0, 0, rest.get(0, 0) - k);
    const ConicRelation expected = ConicRelation::from_coefficients({-*trace.xi, *trace.eta, *trace.theta, 0, 1, 0});
    const ConicRelation found = column_relation(moment_matrix(rest, 2), tol.rank * 10);
    Eigen::Map<const Eigen::VectorXd> ve(expected.coefficients.data(), 6), vf(found.coefficients.data(), 6);
    if (std::abs(ve.dot(vf)) < 1.0 - 1e-6) fail("column relation of the remainder differs from XY = xi - eta X - theta Y", trace);
    if (classify(expected, tol.conic).type != ConicType::NondegenerateHyperbola)
      fail("remainder relation is not a nondegenerate hyperbola", trace);
    const Canonicalization canon = canonicalize(expected, tol.conic);
    const MomentSequence rest_canon = transform_moments(rest, canon.transform);
    std::array<double, 6> target{};
    const Polynomial tp = canonical_polynomial(canon.target);
    std::copy(tp.coefficients().begin(), tp.coefficients().end(), target.begin());
    const Rank5Solution r5 = solve_rank5_extension(rest_canon, ConicRelation::from_coefficients(target), tol);
    trace.hankel_residual = r5.hankel_residual;
    trace.newton_starts = r5.starts_tried;
    trace.beta50 = r5.quintic[0];
    trace.beta41 = r5.quintic[1];
    trace.beta05 = r5.quintic[5];
    MomentSequence m6 = transform_moments(r5.extension.moments, invert(canon.transform));
    m6.set(0, 0, m6.get(0, 0) + k);
    FlatExtension ext = extension_from_moments(m6, tol.rank);
    double dev = 0.0;
    for (const Monomial m : monomials_up_to(4)) dev = std::max(dev, std::abs(m6[m] - sys.ideal[m]));
    if (dev > 1e-7 * h) fail("rank-5 remainder extension does not restrict to M(2)", trace);
    if (ext.rank != 6) fail("double-reduction extension has rank " + std::to_string(ext.rank), trace);
    return ext;
  }

  if (c_eq_a) {
    trace.branch = Branch::LinesCeqA;
    p.c = p.a;
    p.e = p.c * p.c / p.a;
    const double a = p.a, b = p.b, d = p.d, hh = p.h;
    trace.f_value = (a - 1) * (a - 1) * b * b * hh * hh + 2 * b * b * d * (2 * b * b - 3 * d + 3 * a * d) * hh -
                    std::pow(d, 4) * (3 * b * b - 4 * d + 4 * a * d);
    trace.branch_discriminant = 16 * b * b * d * d * std::pow(b * b - d + a * d, 3);
  } else {
    trace.branch = Branch::LinesDeqB;
    p.d = p.b;
    p.f = p.d * p.d / p.b;
    const double a = p.a, b = p.b, c = p.c, hh = p.h;
    trace.f_value = (b - 1) * (b - 1) * hh * hh * c * c +
                    2 * a * (b - 1) * (-2 * b * b * b + 3 * b * b * hh + a * hh * hh - b * hh * hh) * c +
                    a * a * (-4 * a * b * b * b + std::pow(b, 4) + 6 * a * b * b * hh - 2 * b * b * b * hh +
                             a * a * hh * hh - 2 * a * b * hh * hh + b * b * hh * hh);
    trace.branch_discriminant = 16 * a * a * (b - 1) * (b - 1) * b * b * b * std::pow(b - hh, 3);
  }
  trace.parameters = p;
  sys = LineSystem(p);
  const double cscale = sys.residual(Quintic{}).second;

  // Second B(3) block: beta32 = beta23 = beta14 = 0, unknowns beta50, beta41, beta05.
  auto block = [](double b50, double b41, double b05) { return Quintic{b50, b41, 0, 0, 0, b05}; };
  auto solve_outer = [&](double b41) {
    const auto b50 = affine_root([&](double x) { return sys.residual(block(x, b41, 0)).first.e1; }, h, cscale,
                                 "E1", trace);
    if (!b50) fail("E1 does not depend on beta50", trace);
    const auto b05 = affine_root([&](double x) { return sys.residual(block(*b50, b41, x)).first.e3; }, h, cscale,
                                 "E3", trace);
    if (!b05) fail("E3 does not depend on beta05", trace);
    return std::pair{*b50, *b05};
  };
  auto e2_of = [&](double b41) {
    const auto [b50, b05] = solve_outer(b41);
    return sys.residual(block(b50, b41, b05)).first.e2;
  };

  const double gm = e2_of(-h), g0 = e2_of(0.0), gp = e2_of(h);
  const double a2 = (gp + gm - 2 * g0) / (2 * h * h);
  const double a1 = (gp - gm) / (2 * h);
  const double a0 = g0;
  {
    const double g2 = e2_of(2 * h);
    const double pred = a0 + a1 * 2 * h + a2 * 4 * h * h;
    if (std::abs(g2 - pred) > 1e-7 * std::max({cscale, std::abs(g2), std::abs(gp), std::abs(gm)}))
      fail("E2 is not quadratic in beta41", trace);
  }
  if (std::abs(a2) * h * h <= 1e-12 * std::max({cscale, std::abs(gp), std::abs(gm)}))
    fail("leading coefficient of the beta41 quadratic vanishes", trace);
  trace.discriminant = a1 * a1 - 4 * a2 * a0;
  if (!(*trace.discriminant >= 0)) fail("the beta41 quadratic has no real root", trace);

  double b41 = smaller_root(a2, a1, a0);
  for (int it = 0; it < 4; ++it) {
    const double g = e2_of(b41);
    if (std::abs(g) <= 1e-14 * cscale) break;
    const double slope = 2 * a2 * b41 + a1;
    if (slope == 0.0) break;
    b41 -= g / slope;
  }
  const auto [b50, b05] = solve_outer(b41);
  return finish_lines(sys, block(b50, b41, b05), trace, tol);
}

}  // namespace qmp
