// Python bindings for the main verification operations.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smith/suites.hpp"

namespace py = pybind11;
using namespace smith;

namespace {

py::dict residual_dict(const ResidualReport& r) {
  py::dict d;
  d["point"] = Eigen::VectorXd(r.point);
  d["lambda"] = r.lambda;
  d["residual_form"] = r.residual_form;
  d["residual_conformal"] = r.residual_conformal;
  d["inequality_slack"] = r.inequality_slack;
  d["alt_residual"] = r.alt_residual;
  d["pair_defect"] = r.pair_defect;
  d["bound_slack"] = r.bound_slack;
  d["critical"] = r.critical;
  d["degenerate"] = r.degenerate;
  d["pass"] = r.pass_form && r.pass_conformal && r.pass_slack;
  return d;
}

KForm named_form(const std::string& name, int dim) {
  return standard_form(name, dim).form;
}

}  // namespace

PYBIND11_MODULE(_smithmap, m) {
  m.doc() = "numerical verification of calibrated conformal maps";

  m.def("models", [] {
    py::list out;
    for (const FlatModelInfo& info : model_registry()) {
      py::dict d;
      d["name"] = info.name;
      d["direction"] =
          info.direction == Direction::Immersion ? "immersion" : "submersion";
      d["k"] = info.k;
      d["n"] = info.n;
      d["calibration"] = info.calibration;
      out.append(d);
    }
    return out;
  });

  m.def(
      "comass",
      [](const std::string& name, int dim, int restarts, std::uint64_t seed) {
        const ComassEstimate est =
            comass_estimate(named_form(name, dim), restarts, 1e-6, seed);
        py::dict d;
        d["value"] = est.value;
        d["frame"] = Eigen::MatrixXd(est.maximizing_frame);
        d["restarts"] = est.restarts_used;
        return d;
      },
      py::arg("name"), py::arg("dim"), py::arg("restarts") = 200,
      py::arg("seed") = 0);

  m.def(
      "hadamard",
      [](const Eigen::MatrixXd& A) {
        const HadamardResult r = hadamard_check(
            LinearMap(ExtSpace(static_cast<int>(A.cols())),
                      ExtSpace(static_cast<int>(A.rows())), A));
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["conformal_defect"] = r.conformal_defect;
        d["rank_deficient"] = r.rank_deficient;
        return d;
      },
      py::arg("matrix"));

  m.def(
      "residual",
      [](const std::string& model, const Eigen::VectorXd& x, double epsilon) {
        return residual_dict(smith_residual(flat_model(model, epsilon), x));
      },
      py::arg("model"), py::arg("x"), py::arg("epsilon") = 0.0);

  m.def(
      "sweep",
      [](const std::string& model, std::int64_t points, double epsilon) {
        const SweepResult r =
            residual_sweep(flat_model(model, epsilon), points);
        py::dict d;
        d["max_residual_form"] = r.max_residual_form;
        d["max_residual_conformal"] = r.max_residual_conformal;
        d["min_slack"] = r.min_slack;
        d["max_slack"] = r.max_slack;
        d["points"] = r.points;
        d["all_pass"] = r.all_pass;
        return d;
      },
      py::arg("model"), py::arg("points") = 128, py::arg("epsilon") = 0.0);

  m.def(
      "energy",
      [](const std::string& model, int grid, double epsilon) {
        const EnergyReport r = k_energy(flat_model(model, epsilon), grid);
        py::dict d;
        d["energy"] = r.energy;
        d["lower_bound"] = r.lower_bound;
        d["gap"] = r.gap;
        d["points"] = r.points;
        return d;
      },
      py::arg("model"), py::arg("grid") = 8, py::arg("epsilon") = 0.0);

  m.def(
      "tension",
      [](const std::string& model, const Eigen::VectorXd& x, double epsilon,
         double fd_step) {
        return Eigen::VectorXd(
            k_tension(flat_model(model, epsilon), x, fd_step));
      },
      py::arg("model"), py::arg("x"), py::arg("epsilon") = 0.0,
      py::arg("fd_step") = 1e-3);

  m.def(
      "verify_lemmas",
      [](std::uint64_t seed, int cases) {
        SuiteOptions opt;
        opt.seed = seed;
        opt.cases = cases;
        py::list out;
        for (const SuiteResult& r : run_lemma_suites(opt)) {
          py::dict d;
          d["name"] = r.name;
          d["cases"] = r.cases;
          d["max_defect"] = r.max_defect;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("cases") = 300);

  m.def(
      "warped_g2",
      [](double kappa, double c0, double c1,
         const std::vector<double>& r_samples) {
        const WarpedFibration f = bryant_salamon_g2_s3(kappa, c0, c1);
        const WarpedVerification v = verify_warped(f, r_samples);
        py::dict d;
        d["lambda_defect"] = v.lambda_defect;
        d["metric_defect"] = v.metric_defect;
        d["pair_defect"] = v.pair_defect;
        d["lambda_at_zero"] = f.lambda(0.0);
        return d;
      },
      py::arg("kappa"), py::arg("c0"), py::arg("c1"), py::arg("r_samples"));
}
