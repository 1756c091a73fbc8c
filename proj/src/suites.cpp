#include "smith/suites.hpp"

#include <cmath>
#include <random>

namespace smith {

namespace {

using Rng = std::mt19937_64;

Eigen::VectorXd gaussian_vector(Rng& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

Eigen::MatrixXd gaussian_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
  const Eigen::MatrixXd a = gaussian_matrix(rng, n, n);
  return a * a.transpose() / n + Eigen::MatrixXd::Identity(n, n);
}

KForm random_form(Rng& rng, const ExtSpace& space, int degree) {
  KForm a = make_form(space, degree);
  a.coeffs() = gaussian_vector(rng, static_cast<int>(a.coeffs().size()));
  return a;
}

// thin orthonormal k-frame in R^n
Eigen::MatrixXd random_frame(Rng& rng, int n, int k) {
  const Eigen::MatrixXd a = gaussian_matrix(rng, n, k);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  return q;
}

MapJet synthetic_jet(const Eigen::MatrixXd& A) {
  MapJet j;
  j.x = Eigen::VectorXd::Zero(A.cols());
  j.u = Eigen::VectorXd::Zero(A.rows());
  j.jacobian = A;
  return j;
}

SuiteResult finish(std::string name, std::int64_t cases, double defect,
                   double tol) {
  return SuiteResult{std::move(name), cases, defect, tol, defect <= tol};
}

}  // namespace

SuiteResult exterior_suite(std::uint64_t seed, int cases) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double defect = 0.0;
  for (int c = 0; c < cases; ++c) {
    const int n = dim_dist(rng);
    const ExtSpace space = unif(rng) < 0.5
                               ? ExtSpace(n)
                               : ExtSpace(n, random_spd(rng, n));

    // adjunction <i_v a, b> = <a, v-flat ^ b>
    std::uniform_int_distribution<int> deg(1, n);
    const int p = deg(rng);
    const KForm a = random_form(rng, space, p);
    const KForm b = random_form(rng, space, p - 1);
    const Eigen::VectorXd v = gaussian_vector(rng, n);
    KVector vv = make_vector(space, 1);
    vv.coeffs() = v;
    const double lhs = interior(v, a).inner(b);
    const double rhs = a.inner(wedge(lower(vv), b));
    defect = std::max(defect, std::abs(lhs - rhs) /
                                  (1.0 + a.norm() * b.norm() * v.norm()));

    // double star sign and isometry
    const KForm ss = hodge_star(hodge_star(a));
    const double sign = (p * (n - p)) % 2 == 0 ? 1.0 : -1.0;
    defect = std::max(defect, (ss - sign * a).norm() / (1.0 + a.norm()));
    const KForm a2 = random_form(rng, space, p);
    defect = std::max(defect,
                      std::abs(hodge_star(a).inner(hodge_star(a2)) -
                               a.inner(a2)) /
                          (1.0 + a.norm() * a2.norm()));

    // functoriality of the exterior-power matrices
    std::uniform_int_distribution<int> small(1, 5);
    const int n1 = small(rng), n2 = small(rng), n3 = small(rng);
    const int kk = std::uniform_int_distribution<int>(
        1, std::min({n1, n2, n3}))(rng);
    const ExtSpace s1(n1), s2(n2), s3(n3);
    const Eigen::MatrixXd A = gaussian_matrix(rng, n2, n1);
    const Eigen::MatrixXd B = gaussian_matrix(rng, n3, n2);
    const Eigen::MatrixXd lhsM = lambda_k(LinearMap(s1, s3, B * A), kk);
    const Eigen::MatrixXd rhsM =
        lambda_k(LinearMap(s2, s3, B), kk) * lambda_k(LinearMap(s1, s2, A), kk);
    defect = std::max(defect, (lhsM - rhsM).norm() /
                                  (1.0 + lhsM.norm() + rhsM.norm()));
  }
  return finish("exterior-algebra", cases, defect, 1e-10);
}

SuiteResult hadamard_suite(std::uint64_t seed, int cases) {
  Rng rng(seed ^ 0xc2b2ae3d27d4eb4full);
  std::uniform_int_distribution<int> kd(1, 4);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  double defect = 0.0;
  for (int c = 0; c < cases; ++c) {
    const int k = kd(rng);
    const int n = std::uniform_int_distribution<int>(k, 8)(rng);
    const ExtSpace src(k), tgt(n);

    const Eigen::MatrixXd A = gaussian_matrix(rng, n, k);
    const HadamardResult res = hadamard_check(LinearMap(src, tgt, A));
    defect = std::max(defect,
                      std::max(0.0, res.lhs - res.rhs) / std::max(1.0, res.rhs));
    // equality at the stated precision must imply conformality
    if (res.rhs - res.lhs <= 1e-12 * std::max(1.0, res.rhs))
      defect = std::max(defect, res.conformal_defect /
                                    std::max(1.0, A.squaredNorm()) * 1e-5);

    // conformality must imply equality
    const double s = scale(rng);
    const Eigen::MatrixXd Q = s * random_frame(rng, n, k);
    const HadamardResult resq = hadamard_check(LinearMap(src, tgt, Q));
    defect = std::max(defect,
                      std::abs(resq.lhs - resq.rhs) / std::max(1.0, resq.rhs));
    defect = std::max(defect, resq.conformal_defect * 1e-2);
  }
  return finish("hadamard", cases, defect, 1e-10);
}

SuiteResult star_calibration_suite(
    std::uint64_t seed, int cases,
    const std::optional<KForm>& three_form_override) {
  Rng rng(seed ^ 0x165667b19e3779f9ull);
  const KForm phi = three_form_override
                        ? *three_form_override
                        : standard_form("associative", 7).form;
  if (phi.space().dim() != 7 || phi.degree() != 3)
    throw DimensionError("the override must be a 3-form on R^7");
  const KForm psi = hodge_star(phi);

  const ExtSpace s8(8);
  auto embed8 = [&s8](const KForm& a) {
    KForm out = make_form(s8, a.degree());
    const int n = a.space().dim();
    for_each_subset(n, a.degree(), [&](std::int64_t, const MultiIndex& idx) {
      out.set_coeff(idx, a.coeff(idx));
    });
    return out;
  };
  const KForm cayley =
      wedge(basis_form(s8, {7}), embed8(phi)) + embed8(psi);

  double defect = 0.0;
  // fixed identities between the tables
  defect = std::max(defect,
                    (hodge_star(cayley) + cayley).norm() / cayley.norm());
  defect = std::max(defect, (hodge_star(hodge_star(phi)) - phi).norm());
  {
    const KForm w4 = standard_form("kaehler", 4).form;
    defect = std::max(
        defect, (0.5 * wedge(w4, w4) - volume_form(w4.space())).norm());
    const KForm w6 = standard_form("kaehler", 6).form;
    defect = std::max(defect, ((1.0 / 6.0) * wedge(wedge(w6, w6), w6) -
                               volume_form(w6.space()))
                                  .norm());
    const KForm re = standard_form("special-lagrangian", 6).form;
    defect = std::max(defect, wedge(re, w6).norm());
  }

  // coordinate table planes and their normals
  std::vector<std::pair<MultiIndex, double>> planes;
  for_each_subset(7, 3, [&](std::int64_t, const MultiIndex& idx) {
    const double c = phi.coeff(idx);
    if (std::abs(std::abs(c) - 1.0) < 1e-12) planes.emplace_back(idx, c);
  });

  for (int c = 0; c < cases; ++c) {
    // cross-product norm identity |u x v|^2 = |u|^2|v|^2 - <u,v>^2
    const Eigen::VectorXd u = gaussian_vector(rng, 7);
    const Eigen::VectorXd v = gaussian_vector(rng, 7);
    const Eigen::VectorXd cross = interior(v, interior(u, phi)).coeffs();
    const double want =
        u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2);
    defect = std::max(defect, std::abs(cross.squaredNorm() - want) /
                                  std::max(1.0, u.squaredNorm() *
                                                    v.squaredNorm()));

    if (!planes.empty()) {
      const auto& [idx, coeff] =
          planes[std::uniform_int_distribution<std::size_t>(
              0, planes.size() - 1)(rng)];
      Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(7, 3);
      for (int j = 0; j < 3; ++j) frame(idx[j], j) = 1.0;
      frame.col(0) *= coeff > 0 ? 1.0 : -1.0;
      const OrientedFrame of = make_orthonormal_frame(phi.space(), frame);
      defect = std::max(defect,
                        std::abs(is_calibrated_plane(phi, of).value - 1.0));
      defect = std::max(
          defect,
          std::abs(first_cousin_check(phi, of, gaussian_vector(rng, 7))));
    }

    // random-frame comass spot checks
    defect = std::max(defect,
                      std::abs(phi.evaluate(random_frame(rng, 7, 3))) - 1.0);
    defect = std::max(defect,
                      std::abs(psi.evaluate(random_frame(rng, 7, 4))) - 1.0);
    defect = std::max(
        defect, std::abs(cayley.evaluate(random_frame(rng, 8, 4))) - 1.0);
  }
  return finish("star-calibration", cases, defect, 1e-9);
}

SuiteResult connection_suite(std::uint64_t seed, int cases) {
  Rng rng(seed ^ 0x27220a95fe0e35full);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;  // max ratio of defect to its own tolerance
  for (int c = 0; c < cases; ++c) {
    // metric compatibility of the chart connection on a wavy metric
    const int n = 2 + (c % 2);
    const Eigen::MatrixXd amp = 0.15 / n * gaussian_matrix(rng, n, n);
    const Eigen::MatrixXd freq = gaussian_matrix(rng, n, n);
    const Eigen::VectorXd phase = gaussian_vector(rng, n);
    MetricField g{n, [=](const Eigen::VectorXd& x) {
                    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
                    for (int i = 0; i < n; ++i)
                      for (int j = 0; j < n; ++j) {
                        const double w =
                            amp(i, j) *
                            std::sin(freq.row(i).dot(x) + phase[j]);
                        m(i, j) += w;
                        m(j, i) += w;
                      }
                    return m;
                  }};
    const Eigen::VectorXd x0 = gaussian_vector(rng, n);
    const auto gamma = christoffel(g, x0);
    const Eigen::MatrixXd g0 = g.at(x0);
    double metricity = 0.0;
    const double h = 1e-4;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp[k] += h;
      xm[k] -= h;
      const Eigen::MatrixXd dg = (g.at(xp) - g.at(xm)) / (2.0 * h);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = dg(i, j);
          for (int l = 0; l < n; ++l)
            s -= gamma[l](k, i) * g0(l, j) + gamma[l](k, j) * g0(i, l);
          metricity = std::max(metricity, std::abs(s));
        }
    }
    worst = std::max(worst, metricity / 2e-5);

    // divergence / exterior-power commutation on a flat chart
    {
      const ExtSpace s3(3);
      const Eigen::VectorXd b0 = gaussian_vector(rng, 3);
      const Eigen::MatrixXd b1 = gaussian_matrix(rng, 3, 3);
      auto P = [b0, b1, s3](const Eigen::VectorXd& x) {
        KForm beta = make_form(s3, 2);
        beta.coeffs() = b0 + b1 * x;
        Eigen::MatrixXd out(3, 3);
        for (int j = 0; j < 3; ++j)
          out.col(j) =
              interior(Eigen::VectorXd::Unit(3, j), beta).coeffs();
        return out;
      };
      const Eigen::MatrixXd A = gaussian_matrix(rng, 3, 3);
      std::vector<Eigen::MatrixXd> Q;
      for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXd qa = 0.2 * gaussian_matrix(rng, 3, 3);
        Q.push_back(0.5 * (qa + qa.transpose()));
      }
      MapField u = [A, Q](const Eigen::VectorXd& x) {
        MapJet j;
        j.x = x;
        j.u = A * x;
        j.jacobian = A;
        std::vector<Eigen::MatrixXd> hess;
        for (int a = 0; a < 3; ++a) {
          j.u[a] += 0.5 * x.dot(Q[a] * x);
          j.jacobian.row(a) += (Q[a] * x).transpose();
          hess.push_back(Q[a]);
        }
        j.hessian = std::move(hess);
        return j;
      };
      const double comm =
          div_lambda_commute_check(P, u, 1, gaussian_vector(rng, 3));
      worst = std::max(worst, comm / 1e-4);
    }

    // type decomposition: completeness and star exchange
    {
      const int nn = std::uniform_int_distribution<int>(3, 5)(rng);
      const int kk = std::uniform_int_distribution<int>(1, nn - 1)(rng);
      const MapJet J = synthetic_jet(gaussian_matrix(rng, kk, nn));
      const SplitFrame F = horizontal_split(J, MetricField::euclidean(nn));
      if (F.status == SplitStatus::Regular) {
        const int nv = nn - F.rank;
        const int deg =
            std::uniform_int_distribution<int>(1, nn - 1)(rng);
        const KForm a = random_form(rng, ExtSpace(nn), deg);
        auto comps = type_decompose(a, F);
        KForm sum = make_form(ExtSpace(nn), deg);
        for (const auto& [pq, comp] : comps) {
          sum += comp;
          const double ex = type_defect(hodge_star(comp), F,
                                        nv - pq.first, F.rank - pq.second);
          worst = std::max(worst, ex / (1e-8 * (1.0 + a.norm())));
        }
        worst = std::max(worst, (sum - a).norm() / (1e-10 * (1.0 + a.norm())));
      }
    }
  }
  return finish("connection-commutation", cases, worst, 1.0);
}

namespace {

struct JetConfig {
  Direction direction;
  int n;  // total-space dimension
  int k;
  KForm alpha;
};

std::vector<JetConfig> jet_configs() {
  std::vector<JetConfig> out;
  out.push_back({Direction::Immersion, 4, 2, standard_form("kaehler", 4).form});
  out.push_back({Direction::Immersion, 6, 3,
                 standard_form("special-lagrangian", 6).form});
  out.push_back(
      {Direction::Immersion, 7, 3, standard_form("associative", 7).form});
  out.push_back(
      {Direction::Submersion, 4, 2, standard_form("kaehler", 4).form});
  out.push_back(
      {Direction::Submersion, 7, 3, standard_form("coassociative", 7).form});
  out.push_back({Direction::Submersion, 8, 4,
                 hodge_star(standard_form("cayley", 8).form)});
  return out;
}

}  // namespace

SuiteResult inequality_suite(std::uint64_t seed, int cases) {
  Rng rng(seed ^ 0x2545f4914f6cdd1dull);
  const auto configs = jet_configs();
  std::uniform_real_distribution<double> logs(-0.5, 0.5);
  double defect = 0.0;
  for (int c = 0; c < cases; ++c) {
    const JetConfig& cfg = configs[c % configs.size()];
    const double s = std::pow(10.0, logs(rng));
    ResidualReport rep;
    if (cfg.direction == Direction::Immersion) {
      const MapJet J = synthetic_jet(s * gaussian_matrix(rng, cfg.n, cfg.k));
      rep = immersion_residual(J, MetricField::euclidean(cfg.k),
                               MetricField::euclidean(cfg.n), cfg.alpha);
    } else {
      const MapJet J = synthetic_jet(s * gaussian_matrix(rng, cfg.k, cfg.n));
      rep = submersion_residual(J, MetricField::euclidean(cfg.n),
                                MetricField::euclidean(cfg.k), cfg.alpha);
    }
    defect = std::max(defect, -rep.inequality_slack);
  }
  return finish("pointwise-inequality", cases, defect, 1e-10);
}

SuiteResult equivalence_suite(std::uint64_t seed, int cases) {
  Rng rng(seed ^ 0x6c62272e07bb0142ull);
  std::uniform_real_distribution<double> scale(0.6, 1.6);
  std::uniform_real_distribution<double> pert(0.05, 0.3);

  // immersions: conformal jets onto coordinate calibrated planes
  struct ImmConfig {
    int n;
    int k;
    KForm alpha;
    std::vector<std::pair<MultiIndex, double>> planes;
  };
  std::vector<ImmConfig> imm;
  for (const auto& cfg : jet_configs()) {
    if (cfg.direction != Direction::Immersion) continue;
    ImmConfig ic{cfg.n, cfg.k, cfg.alpha, {}};
    for_each_subset(cfg.n, cfg.k, [&](std::int64_t, const MultiIndex& idx) {
      const double cc = cfg.alpha.coeff(idx);
      if (std::abs(std::abs(cc) - 1.0) < 1e-12) ic.planes.emplace_back(idx, cc);
    });
    imm.push_back(std::move(ic));
  }
  const std::vector<std::string> sub_models{
      "kaehler-fibration-T4", "coassoc-fibration-T7", "cayley-fibration-T8"};

  double defect = 0.0;
  for (int c = 0; c < cases; ++c) {
    const double s = scale(rng);
    const double d = pert(rng);
    ResidualReport smith_rep, pert_rep;
    double smith_alt = 0.0, pert_alt = 0.0;
    if (c % 2 == 0) {
      const ImmConfig& ic = imm[(c / 2) % imm.size()];
      const auto& [idx, coeff] =
          ic.planes[std::uniform_int_distribution<std::size_t>(
              0, ic.planes.size() - 1)(rng)];
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ic.n, ic.k);
      for (int j = 0; j < ic.k; ++j) A(idx[j], j) = s;
      A.col(0) *= coeff > 0 ? 1.0 : -1.0;
      const MetricField g = MetricField::euclidean(ic.k);
      const MetricField h = MetricField::euclidean(ic.n);
      smith_rep = immersion_residual(synthetic_jet(A), g, h, ic.alpha);
      smith_alt = alt_immersion_residual(synthetic_jet(A), g, h, ic.alpha);
      const Eigen::MatrixXd B = A + d * gaussian_matrix(rng, ic.n, ic.k);
      pert_rep = immersion_residual(synthetic_jet(B), g, h, ic.alpha);
      pert_alt = alt_immersion_residual(synthetic_jet(B), g, h, ic.alpha);
    } else {
      const SmithProblem prob =
          flat_model(sub_models[(c / 2) % sub_models.size()]);
      const int n = prob.source_dim, k = prob.target_dim;
      const KForm alpha = prob.calibration.eval(Eigen::VectorXd::Zero(n));
      const Eigen::MatrixXd A =
          s * prob.map(Eigen::VectorXd::Zero(n)).jacobian;
      const MetricField h = MetricField::euclidean(n);
      const MetricField g = MetricField::euclidean(k);
      smith_rep = submersion_residual(synthetic_jet(A), h, g, alpha);
      smith_alt = alt_submersion_residual(synthetic_jet(A), h, g, alpha);
      const Eigen::MatrixXd B = A + d * gaussian_matrix(rng, k, n);
      pert_rep = submersion_residual(synthetic_jet(B), h, g, alpha);
      pert_alt = alt_submersion_residual(synthetic_jet(B), h, g, alpha);
    }
    defect = std::max({defect, smith_rep.residual_form,
                       smith_rep.residual_conformal, smith_alt});
    // verdicts of the two pipelines must agree at the coupled tolerance
    const bool direct_pass = pert_rep.residual_form <= 1e-8;
    const bool alt_pass = pert_alt <= 1e-7;
    if (direct_pass != alt_pass) defect = std::max(defect, 1.0);
  }
  return finish("formulation-equivalence", cases, defect, 1e-8);
}

SuiteResult models_suite() {
  double defect = 0.0;
  std::int64_t cases = 0;
  for (const auto& info : model_registry()) {
    ++cases;
    const SweepResult clean = residual_sweep(flat_model(info.name), 64);
    defect = std::max({defect, clean.max_residual_form,
                       1e-2 * clean.max_residual_conformal,
                       -clean.min_slack});
    const SweepResult broken = residual_sweep(flat_model(info.name, 0.1), 64);
    if (broken.max_residual_form < 1e-3 || broken.max_slack <= 0.0)
      defect = std::max(defect, 1.0);
  }
  return finish("flat-models", cases, defect, 1e-10);
}

std::vector<SuiteResult> run_lemma_suites(const SuiteOptions& opt) {
  std::vector<SuiteResult> out;
  out.push_back(exterior_suite(opt.seed, opt.cases));
  out.push_back(hadamard_suite(opt.seed, opt.cases));
  out.push_back(
      star_calibration_suite(opt.seed, opt.cases, opt.three_form_override));
  out.push_back(connection_suite(opt.seed, std::max(6, opt.cases / 25)));
  out.push_back(inequality_suite(opt.seed, opt.cases));
  out.push_back(equivalence_suite(opt.seed, std::max(24, opt.cases / 5)));
  out.push_back(models_suite());
  return out;
}

}  // namespace smith
