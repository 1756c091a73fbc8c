#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "smith/exterior.hpp"

namespace smith {

struct ComassCertificate {
  double value;
  double tol;
};

struct CalibrationForm {
  KForm form;
  std::string name;
  std::optional<ComassCertificate> comass_certificate;
};

struct OrientedFrame {
  // columns are the frame vectors
  Eigen::MatrixXd vectors;
  bool orthonormal;
};

// Checks the Gram matrix against the space metric.
OrientedFrame make_orthonormal_frame(const ExtSpace& space,
                                     Eigen::MatrixXd vectors, double tol = 1e-10);

// Standard constant-coefficient calibrations on euclidean R^n under the
// conventions documented in docs/conventions.md:
//   kaehler            omega = e^12 + e^34 + ... on R^{2m}
//   kaehler-power      omega^p / p! (degree 2p), name "kaehler-power:p"
//   special-lagrangian Re((e^1 + i e^2) ^ (e^3 + i e^4) ^ ...)
//   associative        phi_0 on R^7
//   coassociative      psi_0 = star(phi_0) on R^7, never tabulated
//   cayley             Phi_0 = e^8 ^ phi_0 + psi_0 on R^8
CalibrationForm standard_form(const std::string& name, int n);

struct ComassEstimate {
  double value;              // certified lower bound on the comass
  Eigen::MatrixXd maximizing_frame;  // n x k, orthonormal columns
  int restarts_used;
};

// Multistart projected-gradient ascent over orthonormal k-frames.
// Deterministic for a fixed seed.
ComassEstimate comass_estimate(const KForm& form, int restarts = 200,
                               double tol = 1e-6, std::uint64_t seed = 0);

struct PlaneCheck {
  double value;
  bool calibrated;
};

PlaneCheck is_calibrated_plane(const KForm& form, const OrientedFrame& frame,
                               double tol = 1e-8);

// alpha(e_1,...,e_{k-1}, w) for a calibrated frame and w orthogonal to its
// span (w is projected and renormalized first).  The lemma guarantees the
// result is zero.
double first_cousin_check(const KForm& form, const OrientedFrame& frame,
                          Eigen::VectorXd w, double frame_tol = 1e-10);

// P_alpha: <P_alpha(w), v> = alpha(w ^ v).
Eigen::VectorXd p_alpha(const KForm& form, const KVector& w);

// P_alpha^T(v) = (-1)^{k-1} raise(v hook alpha).
KVector p_alpha_adjoint(const KForm& form, const Eigen::VectorXd& v);

// Operator-norm defect of P_alpha P_alpha^T - |alpha|^2 pi^{(0,1)}, where the
// horizontal projector is onto the span of the given orthonormal columns.
// Requires alpha of type (0,k): zero on any index touching a vertical
// direction (checked against the splitting).
double pp_top_check(const KForm& form, const Eigen::MatrixXd& horizontal,
                    double type_tol = 1e-10);

// Loader for {dim, degree, terms: [{indices: [...], coeff}]} documents.
// Indices are 1-based and strictly increasing; duplicates are rejected.
CalibrationForm load_form_json(const std::string& json_text);
std::string form_to_json(const CalibrationForm& form);

}  // namespace smith
