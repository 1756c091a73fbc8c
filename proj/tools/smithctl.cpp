// smithctl: command-line front end for the calibrated-map verification
// library.  Exit codes: 0 = all checks pass, 1 = a verification failed,
// 2 = input or configuration error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "smith/suites.hpp"

namespace {

using nlohmann::json;
using namespace smith;

constexpr const char* kVersion = "smithmap 0.1.0";

struct RunConfig {
  std::string command;
  std::string model;
  std::string jets_file;
  std::string calibration;
  std::string direction = "immersion";
  double perturb = 0.0;
  int grid = 0;
  int restarts = 200;
  int cases = 300;
  int dim = 0;
  double tol_form = 1e-10;
  double tol_conf = 1e-8;
  double tol_slack = 1e-10;
  double comass_tol = 1e-5;
  double fd_step = 1e-3;
  std::uint64_t seed = 1;
  std::string out_file;
  std::string config_file;
};

json config_echo(const RunConfig& c) {
  return json{{"command", c.command},
              {"model", c.model},
              {"jets", c.jets_file},
              {"calibration", c.calibration},
              {"direction", c.direction},
              {"perturb", c.perturb},
              {"grid", c.grid},
              {"restarts", c.restarts},
              {"cases", c.cases},
              {"dim", c.dim},
              {"tol_form", c.tol_form},
              {"tol_conf", c.tol_conf},
              {"tol_slack", c.tol_slack},
              {"comass_tol", c.comass_tol},
              {"fd_step", c.fd_step},
              {"seed", c.seed}};
}

void emit(const RunConfig& cfg, json report) {
  report["version"] = kVersion;
  report["config_echo"] = config_echo(cfg);
  const std::string text = report.dump(2) + "\n";
  if (cfg.out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + cfg.out_file);
    out << text;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Merge a JSON config under already-parsed flags: a key applies only when
// the corresponding flag was not given on the command line.
void merge_config(CLI::App* sub, RunConfig& cfg) {
  if (cfg.config_file.empty()) return;
  const json doc = json::parse(slurp(cfg.config_file));
  auto absent = [&](const std::string& flag) {
    const CLI::Option* o = sub->get_option_no_throw(flag);
    return o == nullptr || o->count() == 0;
  };
  auto get = [&](const char* key, const std::string& flag, auto& field) {
    if (doc.contains(key) && absent(flag))
      field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("model", "--model", cfg.model);
  get("jets", "--jets", cfg.jets_file);
  get("calibration", "--calibration", cfg.calibration);
  get("direction", "--direction", cfg.direction);
  get("perturb", "--perturb", cfg.perturb);
  get("grid", "--grid", cfg.grid);
  get("restarts", "--restarts", cfg.restarts);
  get("cases", "--cases", cfg.cases);
  get("dim", "--dim", cfg.dim);
  get("tol_form", "--tol-form", cfg.tol_form);
  get("tol_conf", "--tol-conf", cfg.tol_conf);
  get("tol_slack", "--tol-slack", cfg.tol_slack);
  get("tol", "--tol", cfg.comass_tol);
  get("fd_step", "--fd-step", cfg.fd_step);
  get("seed", "--seed", cfg.seed);
}

// Resolve a calibration given as a standard name or a JSON file path.
KForm resolve_calibration(const std::string& spec, int dim_hint) {
  if (spec.find(".json") != std::string::npos || spec.find('/') != std::string::npos)
    return load_form_json(slurp(spec)).form;
  int dim = dim_hint;
  if (dim == 0) {
    if (spec == "associative" || spec == "coassociative") dim = 7;
    else if (spec == "cayley") dim = 8;
    else if (spec == "kaehler") dim = 4;
    else if (spec == "special-lagrangian") dim = 6;
    else throw std::runtime_error("--dim required for calibration " + spec);
  }
  return standard_form(spec, dim).form;
}

json point_report(const ResidualReport& r) {
  json p;
  p["point"] = std::vector<double>(r.point.data(), r.point.data() + r.point.size());
  p["lambda"] = r.lambda;
  p["residual_form"] = r.residual_form;
  p["residual_conformal"] = r.residual_conformal;
  p["inequality_slack"] = r.inequality_slack;
  p["alt_residual"] = r.alt_residual;
  p["pair_defect"] = r.pair_defect;
  p["bound_slack"] = r.bound_slack;
  p["critical"] = r.critical;
  p["degenerate"] = r.degenerate;
  p["pass"] = r.pass_form && r.pass_conformal && r.pass_slack;
  return p;
}

// Deterministic low-discrepancy lattice on the periodic chart (unit box for
// open charts), matching the library's sweep construction.
std::vector<Eigen::VectorXd> lattice(const SmithProblem& prob, int npoints) {
  static const int primes[kMaxDim] = {2,  3,  5,  7,  11, 13, 17, 19,
                                      23, 29, 31, 37, 41, 43, 47, 53};
  const int n = prob.source_dim;
  std::vector<Eigen::VectorXd> out;
  for (int j = 0; j < npoints; ++j) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      const double extent = prob.period.size() == n ? prob.period[i] : 1.0;
      x[i] = extent * std::fmod((j + 1) * std::sqrt(double(primes[i])), 1.0);
    }
    out.push_back(x);
  }
  return out;
}

int cmd_comass(const RunConfig& cfg) {
  const KForm form = resolve_calibration(cfg.calibration, cfg.dim);
  const ComassEstimate est =
      comass_estimate(form, cfg.restarts, 1e-6, cfg.seed);
  const bool is_calibration = est.value <= 1.0 + cfg.comass_tol;
  json summary;
  summary["comass"] = est.value;
  summary["restarts_used"] = est.restarts_used;
  summary["is_calibration"] = is_calibration;
  std::vector<std::vector<double>> frame;
  for (int i = 0; i < est.maximizing_frame.rows(); ++i) {
    const auto row = est.maximizing_frame.row(i);
    frame.emplace_back(row.data(), row.data() + row.size());
  }
  summary["maximizing_frame"] = frame;
  emit(cfg, json{{"summary", summary}, {"points", json::array()}});
  return is_calibration ? 0 : 1;
}

int cmd_check(const RunConfig& cfg) {
  Tolerances tol;
  tol.form = cfg.tol_form;
  tol.conformal = cfg.tol_conf;
  tol.slack = cfg.tol_slack;
  json points = json::array();
  bool all_pass = true;
  double max_form = 0.0, max_conf = 0.0, min_slack = 0.0, max_slack = 0.0;

  auto record = [&](const ResidualReport& r) {
    points.push_back(point_report(r));
    all_pass = all_pass && r.pass_form && r.pass_conformal && r.pass_slack;
    max_form = std::max(max_form, r.residual_form);
    max_conf = std::max(max_conf, r.residual_conformal);
    min_slack = std::min(min_slack, r.inequality_slack);
    max_slack = std::max(max_slack, r.inequality_slack);
  };

  if (!cfg.jets_file.empty()) {
    std::ifstream in(cfg.jets_file);
    if (!in) throw std::runtime_error("cannot read " + cfg.jets_file);
    const std::vector<MapJet> jets = load_jets_jsonl(in);
    if (jets.empty()) throw std::runtime_error("empty jet batch");
    const bool imm = cfg.direction == "immersion";
    const int n1 = jets.front().source_dim();
    const int n2 = jets.front().target_dim();
    const KForm alpha =
        resolve_calibration(cfg.calibration, imm ? n2 : n1);
    const MetricField g1 = MetricField::euclidean(n1);
    const MetricField g2 = MetricField::euclidean(n2);
    for (const MapJet& J : jets)
      record(imm ? immersion_residual(J, g1, g2, alpha, tol)
                 : submersion_residual(J, g1, g2, alpha, tol));
  } else if (!cfg.model.empty()) {
    const SmithProblem prob = flat_model(cfg.model, cfg.perturb);
    const int npoints = cfg.grid > 0 ? cfg.grid : 128;
    for (const Eigen::VectorXd& x : lattice(prob, npoints))
      record(smith_residual(prob, x, tol));
  } else {
    throw std::runtime_error("check needs --model or --jets");
  }

  json summary;
  summary["all_pass"] = all_pass;
  summary["max_residual_form"] = max_form;
  summary["max_residual_conformal"] = max_conf;
  summary["min_slack"] = min_slack;
  summary["max_slack"] = max_slack;
  summary["points"] = points.size();
  emit(cfg, json{{"summary", summary}, {"points", points}});
  return all_pass ? 0 : 1;
}

int cmd_energy(const RunConfig& cfg) {
  if (cfg.model.empty()) throw std::runtime_error("energy needs --model");
  const SmithProblem prob = flat_model(cfg.model, cfg.perturb);
  const int grid = cfg.grid > 0 ? cfg.grid : 8;
  const EnergyReport rep = k_energy(prob, grid);
  // quadrature budget: trapezoid on trigonometric integrands converges
  // spectrally, so any visible negative gap signals a real violation
  const bool pass = rep.gap >= -1e-8;
  json summary;
  summary["energy"] = rep.energy;
  summary["lower_bound"] = rep.lower_bound;
  summary["gap"] = rep.gap;
  summary["quadrature_points"] = rep.points;
  summary["pass"] = pass;
  emit(cfg, json{{"summary", summary}, {"points", json::array()}});
  return pass ? 0 : 1;
}

int cmd_tension(const RunConfig& cfg) {
  if (cfg.model.empty()) throw std::runtime_error("tension needs --model");
  const SmithProblem prob = flat_model(cfg.model, cfg.perturb);
  const int npoints = cfg.grid > 0 ? cfg.grid : 5;
  double max_norm = 0.0;
  json points = json::array();
  for (const Eigen::VectorXd& x : lattice(prob, npoints)) {
    const Eigen::VectorXd tau = k_tension(prob, x, cfg.fd_step);
    max_norm = std::max(max_norm, tau.norm());
    json p;
    p["point"] = std::vector<double>(x.data(), x.data() + x.size());
    p["tension"] = std::vector<double>(tau.data(), tau.data() + tau.size());
    points.push_back(p);
  }
  const double budget = std::max(1e-8, cfg.tol_form * 1e2);
  const bool pass = max_norm <= budget;
  json summary;
  summary["max_tension_norm"] = max_norm;
  summary["budget"] = budget;
  summary["pass"] = pass;
  emit(cfg, json{{"summary", summary}, {"points", points}});
  return pass ? 0 : 1;
}

int cmd_verify_lemmas(const RunConfig& cfg) {
  SuiteOptions opt;
  opt.seed = cfg.seed;
  opt.cases = cfg.cases;
  if (!cfg.calibration.empty())
    opt.three_form_override = resolve_calibration(cfg.calibration, 7);
  const std::vector<SuiteResult> results = run_lemma_suites(opt);
  bool all_pass = true;
  json suites = json::array();
  for (const SuiteResult& r : results) {
    all_pass = all_pass && r.pass;
    suites.push_back(json{{"name", r.name},
                          {"cases", r.cases},
                          {"max_defect", r.max_defect},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass}});
  }
  json summary;
  summary["all_pass"] = all_pass;
  summary["suites"] = suites;
  emit(cfg, json{{"summary", summary}, {"points", json::array()}});
  return all_pass ? 0 : 1;
}

int cmd_models_list(const RunConfig& cfg) {
  json models = json::array();
  for (const FlatModelInfo& info : model_registry())
    models.push_back(json{
        {"name", info.name},
        {"direction",
         info.direction == Direction::Immersion ? "immersion" : "submersion"},
        {"k", info.k},
        {"n", info.n},
        {"calibration", info.calibration}});
  json summary;
  summary["models"] = models;
  emit(cfg, json{{"summary", summary}, {"points", json::array()}});
  return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model, "registry model name");
  sub->add_option("--jets", cfg.jets_file, "jet batch (JSON lines)");
  sub->add_option("--calibration", cfg.calibration,
                  "standard calibration name or JSON file");
  sub->add_option("--direction", cfg.direction)
      ->check(CLI::IsMember({"immersion", "submersion"}));
  sub->add_option("--perturb", cfg.perturb, "perturbation amplitude");
  sub->add_option("--grid", cfg.grid, "sample count (per axis for energy)");
  sub->add_option("--restarts", cfg.restarts);
  sub->add_option("--cases", cfg.cases, "cases per randomized suite");
  sub->add_option("--dim", cfg.dim, "ambient dimension for standard forms");
  sub->add_option("--tol-form", cfg.tol_form);
  sub->add_option("--tol-conf", cfg.tol_conf);
  sub->add_option("--tol-slack", cfg.tol_slack);
  sub->add_option("--tol", cfg.comass_tol, "comass acceptance tolerance");
  sub->add_option("--fd-step", cfg.fd_step);
  sub->add_option("--seed", cfg.seed);
  sub->add_option("--out", cfg.out_file, "report file (default stdout)");
  sub->add_option("--config", cfg.config_file, "JSON config merged under flags");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calibrated-map verification toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* comass = app.add_subcommand("comass", "estimate a form's comass");
  comass->add_option("--standard", cfg.calibration,
                     "standard calibration name");
  comass->add_option("--file", cfg.calibration, "form JSON file");
  CLI::App* check = app.add_subcommand("check", "run residual verification");
  CLI::App* energy = app.add_subcommand("energy", "energy vs lower bound");
  CLI::App* tension = app.add_subcommand("tension", "k-tension field");
  CLI::App* lemmas =
      app.add_subcommand("verify-lemmas", "randomized invariant suites");
  CLI::App* models = app.add_subcommand("models-list", "list registry models");
  for (CLI::App* sub : {comass, check, energy, tension, lemmas, models})
    add_common(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    merge_config(sub, cfg);
    if (cfg.command == "comass") return cmd_comass(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "energy") return cmd_energy(cfg);
    if (cfg.command == "tension") return cmd_tension(cfg);
    if (cfg.command == "verify-lemmas") return cmd_verify_lemmas(cfg);
    if (cfg.command == "models-list") return cmd_models_list(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
