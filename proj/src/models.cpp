#include "smith/models.hpp"

#include <cmath>

namespace smith {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

struct FlatSpec {
  FlatModelInfo info;
  // linear part as a dense matrix, perturbation target row and driver column
  Eigen::MatrixXd linear;
  int perturb_row;
  int perturb_col;
};

std::vector<FlatSpec> build_registry() {
  std::vector<FlatSpec> specs;
  FlatSpec line{{"complex-line-T4", Direction::Immersion, 2, 4, "kaehler"},
                Eigen::MatrixXd::Zero(4, 2),
                2,
                0};
  line.linear(0, 0) = 1.0;
  line.linear(1, 1) = 1.0;
  specs.push_back(line);

  FlatSpec slag{{"slag-plane-T6", Direction::Immersion, 3, 6,
                 "special-lagrangian"},
                Eigen::MatrixXd::Zero(6, 3),
                1,
                0};
  slag.linear(0, 0) = 1.0;  // odd coordinates carry the real axes
  slag.linear(2, 1) = 1.0;
  slag.linear(4, 2) = 1.0;
  specs.push_back(slag);

  FlatSpec assoc{{"associative-T7", Direction::Immersion, 3, 7, "associative"},
                 Eigen::MatrixXd::Zero(7, 3),
                 3,
                 0};
  assoc.linear(0, 0) = assoc.linear(1, 1) = assoc.linear(2, 2) = 1.0;
  specs.push_back(assoc);

  FlatSpec coassoc{{"coassoc-fibration-T7", Direction::Submersion, 3, 7,
                    "coassociative"},
                   Eigen::MatrixXd::Zero(3, 7),
                   0,
                   3};
  coassoc.linear(0, 0) = coassoc.linear(1, 1) = coassoc.linear(2, 2) = 1.0;
  specs.push_back(coassoc);

  // base coordinates (x2, x1, x3, x8): the swap orients the coassociative
  // fibre span(e4..e7) positively for star(Phi_0)
  FlatSpec cayley{{"cayley-fibration-T8", Direction::Submersion, 4, 8,
                   "star-cayley"},
                  Eigen::MatrixXd::Zero(4, 8),
                  0,
                  3};
  cayley.linear(0, 1) = 1.0;
  cayley.linear(1, 0) = 1.0;
  cayley.linear(2, 2) = 1.0;
  cayley.linear(3, 7) = 1.0;
  specs.push_back(cayley);

  FlatSpec kf{{"kaehler-fibration-T4", Direction::Submersion, 2, 4, "kaehler"},
              Eigen::MatrixXd::Zero(2, 4),
              0,
              2};
  kf.linear(0, 0) = kf.linear(1, 1) = 1.0;
  specs.push_back(kf);
  return specs;
}

const std::vector<FlatSpec>& registry_specs() {
  static const std::vector<FlatSpec> specs = build_registry();
  return specs;
}

KForm registry_calibration(const FlatSpec& spec) {
  if (spec.info.calibration == "star-cayley")
    return hodge_star(standard_form("cayley", 8).form);
  return standard_form(spec.info.calibration, spec.info.n).form;
}

MapField perturbed_linear_field(const Eigen::MatrixXd& A, double eps, int row,
                                int col) {
  return [A, eps, row, col](const Eigen::VectorXd& x) {
    MapJet j;
    j.x = x;
    j.u = A * x;
    j.jacobian = A;
    std::vector<Eigen::MatrixXd> hess(
        A.rows(), Eigen::MatrixXd::Zero(A.cols(), A.cols()));
    if (eps != 0.0) {
      j.u[row] += eps * std::sin(x[col]);
      j.jacobian(row, col) += eps * std::cos(x[col]);
      hess[row](col, col) = -eps * std::sin(x[col]);
    }
    j.hessian = std::move(hess);
    return j;
  };
}

}  // namespace

const std::vector<FlatModelInfo>& model_registry() {
  static const std::vector<FlatModelInfo> infos = [] {
    std::vector<FlatModelInfo> out;
    for (const auto& s : registry_specs()) out.push_back(s.info);
    return out;
  }();
  return infos;
}

SmithProblem flat_model(const std::string& name, double epsilon) {
  for (const auto& spec : registry_specs()) {
    if (spec.info.name != name) continue;
    const int n1 = static_cast<int>(spec.linear.cols());
    const int n2 = static_cast<int>(spec.linear.rows());
    KForm alpha = registry_calibration(spec);
    SmithProblem prob{
        spec.info.direction,
        n1,
        n2,
        MetricField::euclidean(n1),
        MetricField::euclidean(n2),
        FormField{alpha.degree(),
                  [alpha](const Eigen::VectorXd&) { return alpha; }, true},
        perturbed_linear_field(spec.linear, epsilon, spec.perturb_row,
                               spec.perturb_col),
        Eigen::VectorXd::Constant(n1, kTau)};
    prob.validate();
    return prob;
  }
  throw std::invalid_argument("unknown flat model: " + name);
}

SmithProblem conformal_diffeo_compose(
    const SmithProblem& model, const MapField& phi,
    const std::vector<Eigen::VectorXd>& sample_points, double tol) {
  if (model.direction != Direction::Immersion)
    throw PreconditionError("conformal precomposition applies to immersions");
  const int k = model.source_dim;
  const ExtSpace lsp(k);
  for (const auto& p : sample_points) {
    const MapJet J = phi(p);
    if (J.source_dim() != k || J.target_dim() != k)
      throw DimensionError("chart map must preserve the source dimension");
    const auto had = hadamard_check(LinearMap(lsp, lsp, J.jacobian));
    if (had.conformal_defect > tol * (1.0 + J.jacobian.squaredNorm()))
      throw PreconditionError("chart map is not conformal at a sample point");
    if (J.jacobian.determinant() <= 0.0)
      throw PreconditionError("chart map must preserve orientation");
  }
  SmithProblem out = model;
  const MapField inner = model.map;
  out.map = [phi, inner](const Eigen::VectorXd& x) {
    const MapJet f = phi(x);
    MapJet g = inner(f.u);
    MapJet composed;
    composed.x = x;
    composed.u = g.u;
    composed.jacobian = g.jacobian * f.jacobian;
    return composed;
  };
  out.period.resize(0);  // compositions need not respect the lattice
  return out;
}

WarpedVerification verify_warped(const WarpedFibration& f,
                                 const std::vector<double>& r_samples) {
  WarpedVerification out;
  const int k = f.base_dim;
  for (double r : r_samples) {
    const double w = f.w(r);
    const double v = f.v(r);
    if (w <= 0.0 || v <= 0.0)
      throw PreconditionError("warping functions must be positive");
    const double lam = f.lambda(r);
    const double ca = f.calib_coeff(r);
    out.lambda_defect = std::max(out.lambda_defect, std::abs(lam * w - 1.0));
    out.metric_defect =
        std::max(out.metric_defect, std::abs(lam * lam * w * w - 1.0));
    out.pair_defect =
        std::max(out.pair_defect, std::abs(ca - std::pow(lam, -k)) /
                                      std::max(1.0, std::abs(ca)));
  }
  return out;
}

WarpedFibration bryant_salamon_g2_s3(double kappa, double c0, double c1) {
  if (kappa <= 0.0 || c0 <= 0.0 || c1 <= 0.0)
    throw PreconditionError("warped fibration parameters must be positive");
  WarpedFibration f;
  f.name = "bryant-salamon-g2-s3";
  f.base_dim = 3;
  f.fibre_dim = 4;
  f.w = [=](double r) {
    return std::cbrt(3.0 * kappa * (c0 + c1 * r * r));
  };
  f.v = [=](double r) { return std::sqrt(c0 + c1 * r * r); };
  f.lambda = [=](double r) {
    return std::pow(3.0 * kappa, -1.0 / 3.0) *
           std::pow(c0 + c1 * r * r, -1.0 / 3.0);
  };
  f.calib_coeff = [=](double r) { return 3.0 * kappa * (c0 + c1 * r * r); };
  return f;
}

WarpedFibration bryant_salamon_asd(std::function<double(double)> w,
                                   std::function<double(double)> v) {
  WarpedFibration f;
  f.name = "bryant-salamon-asd";
  f.base_dim = 4;
  f.fibre_dim = 3;
  f.w = w;
  f.v = std::move(v);
  f.lambda = [w](double r) { return 1.0 / w(r); };
  f.calib_coeff = [w](double r) { return std::pow(w(r), 4); };
  return f;
}

WarpedFibration bryant_salamon_spin7(std::function<double(double)> w,
                                     std::function<double(double)> v) {
  WarpedFibration f = bryant_salamon_asd(std::move(w), std::move(v));
  f.name = "bryant-salamon-spin7";
  f.fibre_dim = 4;
  return f;
}

}  // namespace smith
