#pragma once

#include "smith/smith.hpp"

namespace smith {

// Registry of flat-torus verification models.  Each entry is a linear
// Smith map with an optional smooth periodic perturbation of amplitude
// epsilon that breaks (horizontal) conformality.
struct FlatModelInfo {
  std::string name;
  Direction direction;
  int k;
  int n;
  std::string calibration;
};

const std::vector<FlatModelInfo>& model_registry();

SmithProblem flat_model(const std::string& name, double epsilon = 0.0);

// Precompose an immersion model with a conformal chart map phi; dphi is
// checked to be orientation-preserving conformal at the sample points.
SmithProblem conformal_diffeo_compose(
    const SmithProblem& model, const MapField& phi,
    const std::vector<Eigen::VectorXd>& sample_points, double tol = 1e-10);

// Structural model of a warped fibration: an adapted coframe in which
//   h = w(r)^2 (base block) + v(r)^2 (fibre block)
// and the calibration's (0,k) component has scalar coefficient
// calib_coeff(r) on the pulled-back base volume.  The dilation formula
// lambda(r) is the closed form to be verified against the blocks.
struct WarpedFibration {
  std::string name;
  int base_dim;   // k
  int fibre_dim;  // n - k
  std::function<double(double)> w;
  std::function<double(double)> v;
  std::function<double(double)> lambda;
  std::function<double(double)> calib_coeff;
};

struct WarpedVerification {
  // max over samples of |lambda * w - 1|
  double lambda_defect = 0.0;
  // max over samples of |u*g - lambda^2 h^{(0,2)}| in block form,
  // i.e. |1 - lambda^2 w^2|
  double metric_defect = 0.0;
  // max over samples of the (0,k) equality |calib_coeff - lambda^{-k}|,
  // relative to the coefficient size
  double pair_defect = 0.0;
};

WarpedVerification verify_warped(const WarpedFibration& f,
                                 const std::vector<double>& r_samples);

// The three families of warped fibrations, with their closed-form dilations.
WarpedFibration bryant_salamon_g2_s3(double kappa, double c0, double c1);
WarpedFibration bryant_salamon_asd(std::function<double(double)> w,
                                   std::function<double(double)> v);
WarpedFibration bryant_salamon_spin7(std::function<double(double)> w,
                                     std::function<double(double)> v);

}  // namespace smith
