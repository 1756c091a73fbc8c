// Acceptance gate: one verdict line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smith/suites.hpp"

using namespace smith;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

MapJet synthetic_jet(const Eigen::MatrixXd& A) {
  MapJet j;
  j.x = Eigen::VectorXd::Zero(A.cols());
  j.u = Eigen::VectorXd::Zero(A.rows());
  j.jacobian = A;
  return j;
}

// ---- 1 & 2: exterior algebra and the determinant bound -------------------

Verdict criterion_exterior() {
  const SuiteResult r = exterior_suite(1, 10000);
  return {r.pass, "max defect " + fmt(r.max_defect)};
}

Verdict criterion_hadamard() {
  const SuiteResult r = hadamard_suite(1, 10000);
  return {r.pass, "max defect " + fmt(r.max_defect)};
}

// ---- 3: comass certificates of the standard forms ------------------------

Verdict criterion_comass() {
  const std::vector<KForm> forms = {
      standard_form("associative", 7).form,
      standard_form("coassociative", 7).form,
      standard_form("cayley", 8).form,
      standard_form("kaehler-power:2", 6).form,
      standard_form("kaehler-power:2", 8).form,
      standard_form("special-lagrangian", 6).form,
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const ComassEstimate est = comass_estimate(forms[i], 200, 1e-7, 17 + i);
    worst = std::max(worst, std::abs(est.value - 1.0));
  }
  return {worst <= 1e-5, "max |comass - 1| = " + fmt(worst)};
}

// ---- 4: orthogonal insertions vanish on certified calibrated planes ------

Verdict criterion_first_cousin() {
  const std::vector<KForm> forms = {
      standard_form("associative", 7).form,
      standard_form("coassociative", 7).form,
      standard_form("cayley", 8).form,
      standard_form("kaehler", 4).form,
      standard_form("kaehler-power:2", 6).form,
      standard_form("special-lagrangian", 6).form,
  };
  std::mt19937_64 rng(404);
  double worst = 0.0;
  int certified = 0;
  for (int i = 0; certified < 500; ++i) {
    const KForm& alpha = forms[i % forms.size()];
    const ComassEstimate est =
        comass_estimate(alpha, 12, 1e-9, 1000 + i);
    if (est.value < 1.0 - 1e-6) continue;  // not a maximizer certificate
    ++certified;
    const OrientedFrame frame =
        make_orthonormal_frame(alpha.space(), est.maximizing_frame, 1e-7);
    const double v = first_cousin_check(
        alpha, frame, gaussian_vector(rng, alpha.space().dim()), 1e-7);
    worst = std::max(worst, std::abs(v));
    if (i > 2000) return {false, "could not certify 500 planes"};
  }
  return {worst <= 1e-7, "500 planes, max insertion " + fmt(worst)};
}

// ---- 5: pointwise inequality and its equality case -----------------------

Verdict criterion_inequality() {
  const SuiteResult r = inequality_suite(1, 60000);
  if (!r.pass) return {false, "negative slack " + fmt(r.max_defect)};

  // equality characterization, both directions, over constructed conformal
  // calibrated jets, perturbed jets, and fully random jets
  struct Cfg {
    bool immersion;
    int n, k;
    KForm alpha;
    std::string model;  // submersion source of Smith jets
  };
  std::vector<Cfg> cfgs = {
      {true, 4, 2, standard_form("kaehler", 4).form, ""},
      {true, 7, 3, standard_form("associative", 7).form, ""},
      {false, 7, 3, standard_form("coassociative", 7).form,
       "coassoc-fibration-T7"},
      {false, 8, 4, hodge_star(standard_form("cayley", 8).form),
       "cayley-fibration-T8"},
  };
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> scale(0.6, 1.6);
  double worst = 0.0;
  for (int c = 0; c < 400; ++c) {
    const Cfg& cfg = cfgs[c % cfgs.size()];
    Eigen::MatrixXd A;
    if (cfg.immersion) {
      // conformal frame onto a coordinate calibrated plane
      std::vector<std::pair<MultiIndex, double>> planes;
      for_each_subset(cfg.n, cfg.k, [&](std::int64_t, const MultiIndex& idx) {
        const double cc = cfg.alpha.coeff(idx);
        if (std::abs(std::abs(cc) - 1.0) < 1e-12) planes.emplace_back(idx, cc);
      });
      const auto& [idx, coeff] = planes[std::uniform_int_distribution<
          std::size_t>(0, planes.size() - 1)(rng)];
      A = Eigen::MatrixXd::Zero(cfg.n, cfg.k);
      const double s = scale(rng);
      for (int j = 0; j < cfg.k; ++j) A(idx[j], j) = s;
      A.col(0) *= coeff > 0 ? 1.0 : -1.0;
    } else {
      const SmithProblem prob = flat_model(cfg.model);
      A = scale(rng) * prob.map(Eigen::VectorXd::Zero(cfg.n)).jacobian;
    }
    const int rows = static_cast<int>(A.rows());
    const int cols = static_cast<int>(A.cols());
    const MetricField m1 = MetricField::euclidean(cols);
    const MetricField m2 = MetricField::euclidean(rows);
    auto eval = [&](const Eigen::MatrixXd& B) {
      // m1 is the source metric in both directions: columns of A index the
      // source coordinates
      return cfg.immersion
                 ? immersion_residual(synthetic_jet(B), m1, m2, cfg.alpha)
                 : submersion_residual(synthetic_jet(B), m1, m2, cfg.alpha);
    };
    // forward: conformal calibrated jets achieve equality
    const ResidualReport eq = eval(A);
    worst = std::max({worst, eq.inequality_slack, eq.residual_conformal});
    // converse: near-zero slack forces conformality and calibration
    const double delta =
        std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const ResidualReport rp =
        eval(A + delta * gaussian_matrix(rng, rows, cols));
    const double scale2 = 1.0 + rp.lambda * rp.lambda;
    if (rp.inequality_slack <= 1e-8 &&
        (rp.residual_conformal > 1e-3 * scale2 || rp.residual_form > 1e-6))
      worst = std::max(worst, 1.0);
    if (rp.residual_conformal <= 1e-10 && rp.residual_form <= 1e-10 &&
        rp.inequality_slack > 1e-8)
      worst = std::max(worst, 1.0);
  }
  return {worst <= 1e-8, "max equality defect " + fmt(worst)};
}

// ---- 6: agreement of the two residual pipelines --------------------------

Verdict criterion_equivalence() {
  const SuiteResult r = equivalence_suite(1, 2000);
  return {r.pass, "max defect " + fmt(r.max_defect)};
}

// ---- 7: flat model registry ----------------------------------------------

Verdict criterion_models() {
  double worst_clean = 0.0, min_pert = 1e300;
  bool slack_seen = true;
  for (const auto& info : model_registry()) {
    const std::int64_t pts = std::min<std::int64_t>(
        static_cast<std::int64_t>(std::pow(32.0, info.k)), 16384);
    const SweepResult clean = residual_sweep(flat_model(info.name), pts);
    worst_clean = std::max({worst_clean, clean.max_residual_form,
                            -clean.min_slack});
    const SweepResult pert = residual_sweep(flat_model(info.name, 0.1), 512);
    min_pert = std::min(min_pert, pert.max_residual_form);
    slack_seen = slack_seen && pert.max_slack > 0.0;
  }
  const bool pass = worst_clean <= 1e-12 && min_pert >= 1e-3 && slack_seen;
  return {pass, "clean " + fmt(worst_clean) + ", perturbed >= " +
                    fmt(min_pert)};
}

// ---- 8: the tension field ------------------------------------------------

double variational_defect(
    const std::function<double(const Eigen::Vector2d&)>& f) {
  // u(x) = (f(x), x2) on a flat chart, k = 2; compare the tension paired
  // against a bump with the central-difference derivative of the energy
  const int k = 2;
  auto u = jet_from_map(2, 2, [f](const Eigen::VectorXd& x) {
    return Eigen::Vector2d(f(x), x[1]);
  }, 1e-5);
  const ExtSpace s2(2);
  KForm area = basis_form(s2, {0, 1});
  SmithProblem prob{Direction::Immersion,
                    2,
                    2,
                    MetricField::euclidean(2),
                    MetricField::euclidean(2),
                    FormField{2, [area](const Eigen::VectorXd&) { return area; },
                              true},
                    u,
                    Eigen::VectorXd()};
  const Eigen::Vector2d x0(0.4, 0.2);
  auto bump = [&](const Eigen::Vector2d& p) {
    const double r2 = (p - x0).squaredNorm();
    const double R = 0.3;
    if (r2 >= R * R) return 0.0;
    const double w = 1.0 - r2 / (R * R);
    return w * w * w;
  };
  auto energy_of = [&](double eps) {
    const int N = 80;
    const double L = 0.35, h = 2.0 * L / N;
    double total = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Eigen::Vector2d p(x0[0] - L + (i + 0.5) * h,
                          x0[1] - L + (j + 0.5) * h);
        Eigen::Matrix2d du;
        const double fd = 1e-5;
        for (int c = 0; c < 2; ++c) {
          Eigen::Vector2d pp = p, pm = p;
          pp[c] += fd;
          pm[c] -= fd;
          Eigen::Vector2d up(f(pp) + eps * bump(pp), pp[1]);
          Eigen::Vector2d um(f(pm) + eps * bump(pm), pm[1]);
          du.col(c) = (up - um) / (2.0 * fd);
        }
        total += std::pow(du.squaredNorm(), 0.5 * k) * h * h;
      }
    return total / std::pow(std::sqrt(double(k)), k);
  };
  const double eps = 1e-4;
  const double dE = (energy_of(eps) - energy_of(-eps)) / (2.0 * eps);

  const int N = 40;
  const double L = 0.35, h = 2.0 * L / N;
  double pairing = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Eigen::Vector2d p(x0[0] - L + (i + 0.5) * h, x0[1] - L + (j + 0.5) * h);
      if (bump(p) == 0.0) continue;
      pairing += k_tension(prob, p, 1e-4)[0] * bump(p) * h * h;
    }
  const double predicted = -std::pow(std::sqrt(double(k)), k) / k * dE;
  return std::abs(pairing - predicted) / std::max(1.0, std::abs(predicted));
}

Verdict criterion_tension() {
  // flat models: the tension vanishes identically
  double flat = 0.0;
  for (const auto& info : model_registry()) {
    const SmithProblem prob = flat_model(info.name);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(prob.source_dim, 0.3);
    flat = std::max(flat, k_tension(prob, x).cwiseAbs().maxCoeff());
  }
  if (flat > 1e-12) return {false, "flat model tension " + fmt(flat)};

  // curved charts that stay in the calibrated-conformal class
  double curved = 0.0;
  {
    // a conformal chart precomposition of the flat immersion
    std::vector<Eigen::VectorXd> samples{
        (Eigen::VectorXd(2) << 1.0, 0.4).finished()};
    MapField sq = [](const Eigen::VectorXd& x) {
      MapJet j;
      j.x = x;
      j.u = Eigen::VectorXd(2);
      j.u << x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1];
      j.jacobian = Eigen::MatrixXd(2, 2);
      j.jacobian << 2.0 * x[0], -2.0 * x[1], 2.0 * x[1], 2.0 * x[0];
      return j;
    };
    const SmithProblem composed =
        conformal_diffeo_compose(flat_model("complex-line-T4"), sq, samples);
    curved = std::max(curved,
                      k_tension(composed, samples[0]).cwiseAbs().maxCoeff());

    // conformally rescaled source metric on the flat immersion
    SmithProblem resc = flat_model("complex-line-T4");
    resc.source_metric =
        MetricField{2, [](const Eigen::VectorXd& x) {
                      const double fs = 1.0 + 0.3 * std::sin(x[0]);
                      return (fs * fs * Eigen::Matrix2d::Identity()).eval();
                    }};
    resc.period.resize(0);
    curved = std::max(
        curved, k_tension(resc, Eigen::Vector2d(0.7, 0.4)).cwiseAbs().maxCoeff());
  }
  if (curved > 1e-4) return {false, "curved-chart tension " + fmt(curved)};

  // non-conformal maps: match the variational derivative of the energy
  double vari = 0.0;
  vari = std::max(vari, variational_defect([](const Eigen::Vector2d& p) {
    return p[0] * p[0];
  }));
  vari = std::max(vari, variational_defect([](const Eigen::Vector2d& p) {
    return p[0] + 0.3 * std::sin(p[1]);
  }));
  vari = std::max(vari, variational_defect([](const Eigen::Vector2d& p) {
    return p[0] + 0.2 * p[0] * p[0] + 0.1 * p[1] * p[1];
  }));
  const bool pass = vari <= 1e-3;
  return {pass, "flat " + fmt(flat) + ", curved " + fmt(curved) +
                    ", variational " + fmt(vari)};
}

// ---- 9: energy against the topological bound -----------------------------

Verdict criterion_energy() {
  const std::vector<std::pair<std::string, int>> grids = {
      {"complex-line-T4", 64},    {"slag-plane-T6", 64},
      {"associative-T7", 64},     {"kaehler-fibration-T4", 16},
      {"coassoc-fibration-T7", 4}, {"cayley-fibration-T8", 3},
  };
  double worst = 0.0;
  for (const auto& [name, grid] : grids) {
    const EnergyReport rep = k_energy(flat_model(name), grid);
    worst = std::max(worst, std::abs(rep.gap));
  }
  if (worst > 1e-8) return {false, "Smith model gap " + fmt(worst)};

  bool monotone = true;
  for (const char* name : {"complex-line-T4", "kaehler-fibration-T4"}) {
    double last = 0.0;
    for (double eps : {0.05, 0.1, 0.2}) {
      const int grid = std::string(name) == "complex-line-T4" ? 48 : 12;
      const EnergyReport rep = k_energy(flat_model(name, eps), grid);
      monotone = monotone && rep.gap > last && rep.gap >= -1e-8;
      last = rep.gap;
    }
  }
  return {monotone, "Smith gap " + fmt(worst) + ", perturbation gap monotone"};
}

// ---- 10: conformal rescaling invariance ----------------------------------

Verdict criterion_conformal() {
  using Profile = std::function<double(const Eigen::VectorXd&)>;
  const std::vector<Profile> profiles = {
      [](const Eigen::VectorXd&) { return 2.0; },
      [](const Eigen::VectorXd& x) { return 1.0 + 0.3 * std::sin(x[0]); },
      [](const Eigen::VectorXd& x) { return 1.5 + 0.5 * std::cos(x[0]); },
  };
  static const int primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  double worst = 0.0;
  for (const char* name : {"complex-line-T4", "coassoc-fibration-T7"}) {
    const SmithProblem prob = flat_model(name);
    for (const Profile& f : profiles) {
      for (int j = 0; j < 100; ++j) {
        Eigen::VectorXd x(prob.source_dim);
        for (int i = 0; i < prob.source_dim; ++i)
          x[i] = prob.period[i] *
                 std::fmod((j + 1) * std::sqrt(double(primes[i])), 1.0);
        const ConformalCheck chk = conformal_invariance_check(prob, f, x);
        const bool ok = chk.after.pass_form && chk.after.pass_conformal &&
                        chk.after.pass_slack;
        worst = std::max(worst, ok ? chk.lambda_ratio_defect : 1.0);
      }
    }
  }
  return {worst <= 1e-10, "max dilation-ratio defect " + fmt(worst)};
}

// ---- 11: warped fibration identities -------------------------------------

Verdict criterion_warped() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> unif(0.2, 5.0);
  std::vector<double> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(0.05 * i);

  double worst = 0.0, lam_defect = 0.0;
  for (int draw = 0; draw < 5; ++draw) {
    const double kappa = unif(rng), c0 = unif(rng), c1 = unif(rng);
    const WarpedFibration g2 = bryant_salamon_g2_s3(kappa, c0, c1);
    const WarpedVerification v = verify_warped(g2, rs);
    worst = std::max({worst, v.lambda_defect, v.metric_defect, v.pair_defect});
    for (double r : {0.0, 0.7, 1.9}) {
      const double closed = std::pow(3.0 * kappa, -1.0 / 3.0) *
                            std::pow(c0 + c1 * r * r, -1.0 / 3.0);
      lam_defect = std::max(lam_defect, std::abs(g2.lambda(r) - closed));
    }

    const double a = unif(rng), b = unif(rng);
    auto w = [a, b](double r) { return std::sqrt(a + b * r * r); };
    auto vv = [a](double r) { return a + r * r; };
    const WarpedVerification va = verify_warped(bryant_salamon_asd(w, vv), rs);
    const WarpedVerification vs =
        verify_warped(bryant_salamon_spin7(w, vv), rs);
    worst = std::max({worst, va.lambda_defect, va.metric_defect,
                      va.pair_defect, vs.lambda_defect, vs.metric_defect,
                      vs.pair_defect});
  }
  const bool pass = worst <= 1e-10 && lam_defect <= 1e-12;
  return {pass, "identity defect " + fmt(worst) + ", dilation formula " +
                    fmt(lam_defect)};
}

// ---- 12: CLI determinism and exit codes ----------------------------------

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SMITHCTL_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  return {WEXITSTATUS(pclose(pipe)), out};
}

Verdict criterion_cli() {
  const RunResult a = run_cli("check --model slag-plane-T6 --grid 32 --seed 5");
  const RunResult b = run_cli("check --model slag-plane-T6 --grid 32 --seed 5");
  if (a.exit_code != 0 || a.output.empty() || a.output != b.output)
    return {false, "report not deterministic"};
  const RunResult v1 = run_cli("verify-lemmas --cases 60 --seed 2");
  const RunResult v2 = run_cli("verify-lemmas --cases 60 --seed 2");
  if (v1.exit_code != 0 || v1.output != v2.output)
    return {false, "suite report not deterministic"};

  if (run_cli("check --model slag-plane-T6 --grid 8 --perturb 0.1").exit_code !=
      1)
    return {false, "perturbed model should exit 1"};
  if (run_cli("comass --file /nonexistent_form.json").exit_code != 2)
    return {false, "bad input should exit 2"};

  const RunResult fix = run_cli(
      "verify-lemmas --cases 60 --calibration " + std::string(FIXTURE_DIR) +
      "/broken_associative.json");
  if (fix.exit_code != 1)
    return {false, "broken convention fixture should exit 1"};
  if (fix.output.find("\"name\": \"star-calibration\"") == std::string::npos)
    return {false, "fixture report missing suite table"};
  return {true, "byte-identical reports, exit codes 0/1/2"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"exterior algebra invariants (10^4 cases)", criterion_exterior},
      {"determinant bound and equality case (10^4 cases)", criterion_hadamard},
      {"comass certificates of the standard forms", criterion_comass},
      {"orthogonal insertion on 500 certified planes", criterion_first_cousin},
      {"pointwise inequality and equality characterization",
       criterion_inequality},
      {"direct vs operator-form residual agreement", criterion_equivalence},
      {"flat model registry sweeps", criterion_models},
      {"tension field: flat, curved, variational", criterion_tension},
      {"energy vs topological bound", criterion_energy},
      {"conformal rescaling invariance", criterion_conformal},
      {"warped fibration identities", criterion_warped},
      {"CLI determinism and exit-code contract", criterion_cli},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict v{false, "exception"};
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%2zu] %-52s %s (%s, %.1fs)\n", i + 1, criteria[i].name,
                v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
