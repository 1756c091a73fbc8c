#pragma once

#include "smith/calibration.hpp"
#include "smith/geometry.hpp"

namespace smith {

enum class Direction { Immersion, Submersion };

// A verification problem: a map u between two chart metrics together with a
// calibration field of matching degree.  For an immersion u: (L^k, g) ->
// (M^n, h) the calibration lives on the target and has degree k; for a
// submersion u: (M^n, h) -> (L^k, g) it lives on the source with degree n-k.
struct SmithProblem {
  Direction direction;
  int source_dim;
  int target_dim;
  MetricField source_metric;
  MetricField target_metric;
  FormField calibration;
  MapField map;
  // periodic chart extents per source coordinate; empty for open charts
  Eigen::VectorXd period;

  int k() const {
    return direction == Direction::Immersion ? source_dim : target_dim;
  }
  void validate() const;
};

struct Tolerances {
  double form = 1e-10;
  double conformal = 1e-8;
  double slack = 1e-10;
  // Lipschitz budget linking the form equation to the conformal one
  double coupling = 10.0;
};

struct ResidualReport {
  Eigen::VectorXd point;
  double lambda = 0.0;
  double residual_form = 0.0;
  double residual_conformal = 0.0;
  double inequality_slack = 0.0;
  double alt_residual = 0.0;
  // submersion only: defect of u*vol_L = lambda^k (star alpha)^{(0,k)} and
  // slack of the one-sided bound on the oriented horizontal frame
  double pair_defect = 0.0;
  double bound_slack = 0.0;
  bool critical = false;
  bool degenerate = false;
  bool pass_form = true;
  bool pass_conformal = true;
  bool pass_slack = true;
};

// lambda = |du| / sqrt(k).
double dilation(const MapJet& J, const MetricField& g,
                const MetricField& h_target, int k);

// Jet-level forms of the residuals for sweeps over synthetic jets.  For
// immersions alpha is evaluated at u(x); for submersions at x.
ResidualReport immersion_residual(const MapJet& J, const MetricField& g,
                                  const MetricField& h, const KForm& alpha,
                                  const Tolerances& tol = {});
ResidualReport submersion_residual(const MapJet& J, const MetricField& h,
                                   const MetricField& g, const KForm& alpha,
                                   const Tolerances& tol = {});
double alt_immersion_residual(const MapJet& J, const MetricField& g,
                              const MetricField& h, const KForm& alpha);
double alt_submersion_residual(const MapJet& J, const MetricField& h,
                               const MetricField& g, const KForm& alpha);

ResidualReport immersion_residual(const SmithProblem& prob,
                                  const Eigen::VectorXd& x,
                                  const Tolerances& tol = {});
ResidualReport submersion_residual(const SmithProblem& prob,
                                   const Eigen::VectorXd& x,
                                   const Tolerances& tol = {});
ResidualReport smith_residual(const SmithProblem& prob,
                              const Eigen::VectorXd& x,
                              const Tolerances& tol = {});

// Operator defect of the equivalent P_alpha formulation,
//   P_alpha . Lambda^{k-1}(du) . star_L = (-1)^{k-1} k^{-(k-2)/2} |du|^{k-2} du
// for immersions and
//   star_L Lambda^{k-1}(du)(. hook star alpha) = same right-hand side
// for submersions, measured over the coordinate basis in operator norm.
double alt_immersion_residual(const SmithProblem& prob,
                              const Eigen::VectorXd& x);
double alt_submersion_residual(const SmithProblem& prob,
                               const Eigen::VectorXd& x);

struct EnergyReport {
  double energy;
  double lower_bound;
  double gap;
  std::int64_t points;
};

// k-energy by tensor-product trapezoid quadrature on the periodic chart,
// with the topological bound (integral of u*alpha, resp. alpha ^ u*vol_L).
// grid_per_axis is the number of sample points per source coordinate.
EnergyReport k_energy(const SmithProblem& prob, int grid_per_axis);

// tau_k = Div(|du|^{k-2} du).
Eigen::VectorXd k_tension(const SmithProblem& prob, const Eigen::VectorXd& x,
                          double h_fd = 1e-3);

struct SweepResult {
  double max_residual_form = 0.0;
  double max_residual_conformal = 0.0;
  double min_slack = 0.0;
  double max_slack = 0.0;
  std::int64_t points = 0;
  bool all_pass = true;
};

// Evaluate the residuals on a deterministic Kronecker lattice covering the
// periodic chart (or the unit box for open charts).
SweepResult residual_sweep(const SmithProblem& prob, std::int64_t npoints,
                           const Tolerances& tol = {});

struct ConformalCheck {
  ResidualReport before;
  ResidualReport after;
  double lambda_ratio_defect;  // |lambda_after - lambda_before / f|
};

// Rescale g -> f^2 g (immersion) or the horizontal metric block (submersion)
// and re-evaluate; Smith verdicts must be preserved with lambda -> lambda/f.
ConformalCheck conformal_invariance_check(
    const SmithProblem& prob,
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Tolerances& tol = {});

// For a map that is Smith at x: immersions report |u*(nabla_V alpha)|,
// submersions report the norm of (star alpha)^{(1,k-1)} plus the values of
// nabla_X alpha on the vertical frame for sampled X.
struct NablaCheck {
  double pullback_defect = 0.0;   // immersion
  double type_defect = 0.0;       // submersion: (star alpha)^{(1,k-1)}
  double vertical_defect = 0.0;   // submersion: (nabla_X alpha)(vertical)
};
NablaCheck pullback_nabla_check(const SmithProblem& prob,
                                const Eigen::VectorXd& V,
                                const Eigen::VectorXd& x,
                                const Tolerances& tol = {});

}  // namespace smith
