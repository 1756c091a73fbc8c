#include "smith/smith.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

namespace smith {

namespace {

// oriented g-orthonormal frame: columns of L^{-T} for g = L L^T; upper
// triangular with positive diagonal, so the determinant is positive
Eigen::MatrixXd oriented_frame(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  return Eigen::LLT<Eigen::MatrixXd>(g).matrixL().transpose().solve(
      Eigen::MatrixXd::Identity(n, n));
}

double spectral_norm(const Eigen::MatrixXd& m) {
  return m.size() ? m.jacobiSvd().singularValues()[0] : 0.0;
}

bool is_critical(double du2) { return du2 <= 1e-26; }

// finite-difference exterior derivative defect at x
double closedness_defect(const FormField& a, const Eigen::VectorXd& x,
                         double h) {
  const KForm a0 = a.eval(x);
  const int n = a0.space().dim();
  const int k = a0.degree();
  if (k + 1 > n) return 0.0;
  std::vector<Eigen::VectorXd> da(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    da[j] = (a.eval(xp).coeffs() - a.eval(xm).coeffs()) / (2.0 * h);
  }
  double worst = 0.0;
  for_each_subset(n, k + 1, [&](std::int64_t, const MultiIndex& J) {
    double sum = 0.0;
    for (int m = 0; m <= k; ++m) {
      MultiIndex rest;
      for (int i = 0; i <= k; ++i)
        if (i != m) rest.push_back(J[i]);
      const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      sum += sgn * da[J[m]][colex_rank(rest)];
    }
    worst = std::max(worst, std::abs(sum));
  });
  return worst;
}

double alt_scale(double du2, int k) {
  const double sign = (k % 2 == 0) ? -1.0 : 1.0;
  return sign * std::pow(du2, 0.5 * (k - 2)) / std::pow(std::sqrt(double(k)), k - 2);
}

}  // namespace

void SmithProblem::validate() const {
  const int expected = direction == Direction::Immersion
                           ? source_dim
                           : source_dim - target_dim;
  if (calibration.degree != expected)
    throw DegreeError("calibration degree does not match the map direction");
  if (direction == Direction::Submersion && target_dim > source_dim)
    throw DimensionError("submersion needs source_dim >= target_dim");
  if (source_metric.dim != source_dim || target_metric.dim != target_dim)
    throw DimensionError("metric dimensions do not match the problem");
}

double dilation(const MapJet& J, const MetricField& g,
                const MetricField& h_target, int k) {
  return std::sqrt(du_norm_sq(J, g, h_target) / k);
}

ResidualReport immersion_residual(const MapJet& J, const MetricField& g,
                                  const MetricField& h, const KForm& alpha,
                                  const Tolerances& tol) {
  const int k = J.source_dim();
  if (alpha.degree() != k)
    throw DegreeError("immersion calibration must have degree k");
  ResidualReport rep;
  rep.point = J.x;
  const double du2 = du_norm_sq(J, g, h);
  rep.lambda = std::sqrt(du2 / k);
  if (is_critical(du2)) {
    rep.critical = true;
    return rep;
  }
  const Eigen::MatrixXd gs = g.at(J.x);
  const Eigen::MatrixXd E = oriented_frame(gs);
  const double pulled = alpha.evaluate(J.jacobian * E);
  const double lk = std::pow(rep.lambda, k);
  rep.residual_form = std::abs(pulled - lk);
  rep.inequality_slack = lk - pulled;
  rep.residual_conformal =
      (pullback_metric(J, h) - rep.lambda * rep.lambda * gs).norm();
  rep.pass_form = rep.residual_form <= tol.form;
  rep.pass_conformal = rep.residual_conformal <= tol.coupling * tol.conformal;
  rep.pass_slack = rep.inequality_slack >= -tol.slack;
  return rep;
}

double alt_immersion_residual(const MapJet& J, const MetricField& g,
                              const MetricField& h, const KForm& alpha) {
  const int k = J.source_dim();
  const int n = J.target_dim();
  const double du2 = du_norm_sq(J, g, h);
  const ExtSpace lsp(k, g.at(J.x));
  const ExtSpace msp(n, h.at(J.u));
  const LinearMap du(lsp, msp, J.jacobian);
  Eigen::MatrixXd lhs(n, k), rhs(n, k);
  for (int i = 0; i < k; ++i) {
    KVector ei(lsp, 1, Variance::Vector,
               Eigen::VectorXd::Unit(k, i));
    KVector pushed = lambda_k_apply(du, hodge_star(ei));
    KForm alpha_m(msp, alpha.degree(), Variance::Form, alpha.coeffs());
    lhs.col(i) = p_alpha(alpha_m, pushed);
    rhs.col(i) = alt_scale(du2, k) * J.jacobian.col(i);
  }
  return spectral_norm(lhs - rhs);
}

ResidualReport submersion_residual(const MapJet& J, const MetricField& h,
                                   const MetricField& g, const KForm& alpha,
                                   const Tolerances& tol) {
  const int n = J.source_dim();
  const int k = J.target_dim();
  if (alpha.degree() != n - k)
    throw DegreeError("submersion calibration must have degree n - k");
  ResidualReport rep;
  rep.point = J.x;
  const double du2 = du_norm_sq(J, h, g);
  rep.lambda = std::sqrt(du2 / k);
  if (is_critical(du2)) {
    rep.critical = true;
    return rep;
  }
  const Eigen::MatrixXd hs = h.at(J.x);
  const ExtSpace msp(n, hs);
  const ExtSpace lsp(k, g.at(J.u));
  const KForm alpha_m(msp, alpha.degree(), Variance::Form, alpha.coeffs());
  const KForm uvol = pullback(LinearMap(msp, lsp, J.jacobian), volume_form(lsp));

  const Eigen::MatrixXd E = oriented_frame(hs);
  const double wedge_val = wedge(alpha_m, uvol).evaluate(E);
  const double lk = std::pow(rep.lambda, k);
  rep.residual_form = std::abs(wedge_val - lk);
  rep.inequality_slack = lk - wedge_val;

  SplitFrame F = horizontal_split(J, h);
  rep.degenerate = F.status == SplitStatus::Degenerate;
  rep.residual_conformal =
      (pullback_metric(J, g) -
       rep.lambda * rep.lambda * horizontal_metric_block(hs, F))
          .norm();

  const KForm star_alpha = hodge_star(alpha_m);
  const KTensor star0k = type_component(star_alpha, F, 0, k);
  rep.pair_defect = (uvol - lk * star0k).norm();
  if (F.rank == k &&
      rep.residual_conformal <= tol.coupling * tol.conformal)
    rep.bound_slack =
        uvol.evaluate(F.horizontal) - lk * star0k.evaluate(F.horizontal);

  rep.pass_form = rep.residual_form <= tol.form;
  rep.pass_conformal = rep.residual_conformal <= tol.coupling * tol.conformal;
  rep.pass_slack = rep.inequality_slack >= -tol.slack;
  return rep;
}

double alt_submersion_residual(const MapJet& J, const MetricField& h,
                               const MetricField& g, const KForm& alpha) {
  const int n = J.source_dim();
  const int k = J.target_dim();
  const double du2 = du_norm_sq(J, h, g);
  const ExtSpace msp(n, h.at(J.x));
  const ExtSpace lsp(k, g.at(J.u));
  const KForm alpha_m(msp, alpha.degree(), Variance::Form, alpha.coeffs());
  const KForm star_alpha = hodge_star(alpha_m);
  const LinearMap du(msp, lsp, J.jacobian);
  Eigen::MatrixXd lhs(k, n), rhs(k, n);
  for (int j = 0; j < n; ++j) {
    const KForm hooked = interior(Eigen::VectorXd::Unit(n, j), star_alpha);
    const KVector pushed = lambda_k_apply(du, raise(hooked));
    lhs.col(j) = hodge_star(pushed).coeffs();
    rhs.col(j) = alt_scale(du2, k) * J.jacobian.col(j);
  }
  return spectral_norm(lhs - rhs);
}

ResidualReport immersion_residual(const SmithProblem& prob,
                                  const Eigen::VectorXd& x,
                                  const Tolerances& tol) {
  prob.validate();
  const MapJet J = prob.map(x);
  return immersion_residual(J, prob.source_metric, prob.target_metric,
                            prob.calibration.eval(J.u), tol);
}

ResidualReport submersion_residual(const SmithProblem& prob,
                                   const Eigen::VectorXd& x,
                                   const Tolerances& tol) {
  prob.validate();
  const MapJet J = prob.map(x);
  return submersion_residual(J, prob.source_metric, prob.target_metric,
                             prob.calibration.eval(x), tol);
}

ResidualReport smith_residual(const SmithProblem& prob,
                              const Eigen::VectorXd& x,
                              const Tolerances& tol) {
  return prob.direction == Direction::Immersion
             ? immersion_residual(prob, x, tol)
             : submersion_residual(prob, x, tol);
}

double alt_immersion_residual(const SmithProblem& prob,
                              const Eigen::VectorXd& x) {
  prob.validate();
  const MapJet J = prob.map(x);
  return alt_immersion_residual(J, prob.source_metric, prob.target_metric,
                                prob.calibration.eval(J.u));
}

double alt_submersion_residual(const SmithProblem& prob,
                               const Eigen::VectorXd& x) {
  prob.validate();
  const MapJet J = prob.map(x);
  return alt_submersion_residual(J, prob.source_metric, prob.target_metric,
                                 prob.calibration.eval(x));
}

EnergyReport k_energy(const SmithProblem& prob, int grid_per_axis) {
  prob.validate();
  const int n1 = prob.source_dim;
  if (prob.period.size() != n1)
    throw PreconditionError(
        "k-energy needs a periodic chart: the bound is topological only "
        "for closed domains");
  for (int i = 0; i < n1; ++i)
    if (prob.period[i] <= 0.0)
      throw PreconditionError("chart periods must be positive");
  if (grid_per_axis < 2)
    throw PreconditionError("quadrature needs at least 2 points per axis");

  if (!prob.calibration.constant) {
    const Eigen::VectorXd probe = 0.25 * prob.period;
    const Eigen::VectorXd c = prob.direction == Direction::Immersion
                                  ? prob.map(probe).u
                                  : probe;
    if (closedness_defect(prob.calibration, c, 1e-4) > 1e-6)
      throw PreconditionError("calibration field is not closed");
  }

  const int k = prob.k();
  double cell = 1.0;
  for (int i = 0; i < n1; ++i) cell *= prob.period[i] / grid_per_axis;

  std::int64_t total = 1;
  for (int i = 0; i < n1; ++i) total *= grid_per_axis;

  double energy = 0.0, bound = 0.0;
  std::vector<int> idx(n1, 0);
  Eigen::VectorXd x(n1);
  for (std::int64_t c = 0; c < total; ++c) {
    for (int i = 0; i < n1; ++i)
      x[i] = prob.period[i] * idx[i] / grid_per_axis;
    const MapJet J = prob.map(x);
    const Eigen::MatrixXd gs = prob.source_metric.at(x);
    const double du2 = du_norm_sq(J, prob.source_metric, prob.target_metric);
    const double lam_k = std::pow(du2 / k, 0.5 * k);
    energy += lam_k * std::sqrt(gs.determinant());
    if (prob.direction == Direction::Immersion) {
      bound += prob.calibration.eval(J.u).evaluate(J.jacobian);
    } else {
      const ExtSpace msp(n1, gs);
      const ExtSpace lsp(k, prob.target_metric.at(J.u));
      const KForm alpha = prob.calibration.eval(x);
      const KForm alpha_m(msp, alpha.degree(), Variance::Form, alpha.coeffs());
      const KForm uvol =
          pullback(LinearMap(msp, lsp, J.jacobian), volume_form(lsp));
      bound += wedge(alpha_m, uvol)
                   .evaluate(Eigen::MatrixXd::Identity(n1, n1));
    }
    // odometer
    for (int i = 0; i < n1; ++i) {
      if (++idx[i] < grid_per_axis) break;
      idx[i] = 0;
    }
  }
  energy *= cell;
  bound *= cell;
  return EnergyReport{energy, bound, energy - bound, total};
}

Eigen::VectorXd k_tension(const SmithProblem& prob, const Eigen::VectorXd& x,
                          double h_fd) {
  prob.validate();
  const int k = prob.k();
  auto B = [&](const Eigen::VectorXd& p) {
    const MapJet J = prob.map(p);
    const double du2 = du_norm_sq(J, prob.source_metric, prob.target_metric);
    return Eigen::MatrixXd(std::pow(du2, 0.5 * (k - 2)) * J.jacobian);
  };
  return divergence_mixed(B, prob.source_metric, prob.target_metric, prob.map,
                          x, h_fd);
}

SweepResult residual_sweep(const SmithProblem& prob, std::int64_t npoints,
                           const Tolerances& tol) {
  prob.validate();
  const int n = prob.source_dim;
  // Kronecker lattice: x_j = frac(j * sqrt(p_i)) per axis, scaled to the chart
  static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37,
                                  41, 43, 47, 53};
  Eigen::VectorXd extent = prob.period.size() == n
                               ? prob.period
                               : Eigen::VectorXd(Eigen::VectorXd::Ones(n));
  SweepResult out;
  out.points = npoints;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.max_slack = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(n);
  for (std::int64_t j = 0; j < npoints; ++j) {
    for (int i = 0; i < n; ++i) {
      const double g = std::sqrt(primes[i % 16]);
      x[i] = extent[i] * std::fmod(static_cast<double>(j + 1) * g, 1.0);
    }
    const ResidualReport rep = smith_residual(prob, x, tol);
    out.max_residual_form = std::max(out.max_residual_form, rep.residual_form);
    out.max_residual_conformal =
        std::max(out.max_residual_conformal, rep.residual_conformal);
    out.min_slack = std::min(out.min_slack, rep.inequality_slack);
    out.max_slack = std::max(out.max_slack, rep.inequality_slack);
    out.all_pass = out.all_pass && rep.pass_form && rep.pass_slack;
  }
  return out;
}

ConformalCheck conformal_invariance_check(
    const SmithProblem& prob,
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Tolerances& tol) {
  prob.validate();
  const double fx = f(x);
  if (fx <= 0.0)
    throw PreconditionError("conformal factor must be positive");

  ConformalCheck out;
  out.before = smith_residual(prob, x, tol);

  SmithProblem scaled = prob;
  if (prob.direction == Direction::Immersion) {
    const MetricField base = prob.source_metric;
    scaled.source_metric.dim = base.dim;
    scaled.source_metric.constant = false;
    scaled.source_metric.h_fd = base.h_fd;
    scaled.source_metric.eval = [base, f](const Eigen::VectorXd& p) {
      const double fp = f(p);
      if (fp <= 0.0)
        throw PreconditionError("conformal factor must be positive");
      return Eigen::MatrixXd(fp * fp * base.at(p));
    };
  } else {
    const MetricField base = prob.source_metric;
    const MapField map = prob.map;
    scaled.source_metric.dim = base.dim;
    scaled.source_metric.constant = false;
    scaled.source_metric.h_fd = base.h_fd;
    scaled.source_metric.eval = [base, map, f](const Eigen::VectorXd& p) {
      const double fp = f(p);
      if (fp <= 0.0)
        throw PreconditionError("conformal factor must be positive");
      const Eigen::MatrixXd hp = base.at(p);
      const SplitFrame F = horizontal_split(map(p), base);
      if (F.rank == 0) return hp;
      return Eigen::MatrixXd(vertical_metric_block(hp, F) +
                             fp * fp * horizontal_metric_block(hp, F));
    };
  }
  out.after = smith_residual(scaled, x, tol);
  out.lambda_ratio_defect = std::abs(out.after.lambda - out.before.lambda / fx);
  return out;
}

NablaCheck pullback_nabla_check(const SmithProblem& prob,
                                const Eigen::VectorXd& V,
                                const Eigen::VectorXd& x,
                                const Tolerances& tol) {
  prob.validate();
  const ResidualReport rep = smith_residual(prob, x, tol);
  if (!rep.critical &&
      rep.residual_form > std::max(tol.form, 1e-8))
    throw PreconditionError("map is not Smith at the sample point");

  NablaCheck out;
  const MapJet J = prob.map(x);
  if (prob.direction == Direction::Immersion) {
    const KForm nab = covariant_derivative_form(
        prob.calibration, prob.target_metric, V, J.u);
    const ExtSpace lsp(prob.source_dim, prob.source_metric.at(x));
    const ExtSpace msp(prob.target_dim, prob.target_metric.at(J.u));
    const KForm nab_m(msp, nab.degree(), Variance::Form, nab.coeffs());
    out.pullback_defect =
        pullback(LinearMap(lsp, msp, J.jacobian), nab_m).norm();
  } else {
    const int n = prob.source_dim;
    const int k = prob.target_dim;
    const Eigen::MatrixXd hs = prob.source_metric.at(x);
    const ExtSpace msp(n, hs);
    const KForm alpha = prob.calibration.eval(x);
    const KForm alpha_m(msp, alpha.degree(), Variance::Form, alpha.coeffs());
    const SplitFrame F = horizontal_split(J, prob.source_metric);
    out.type_defect =
        type_component(hodge_star(alpha_m), F, 1, k - 1).norm();
    const KForm nab = covariant_derivative_form(prob.calibration,
                                                prob.source_metric, V, x);
    out.vertical_defect = std::abs(nab.evaluate(F.vertical));
  }
  return out;
}

}  // namespace smith
