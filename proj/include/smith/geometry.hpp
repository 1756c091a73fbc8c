#pragma once

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "smith/exterior.hpp"

namespace smith {

// Chart-based Riemannian machinery.  Fields are given by pure evaluators on
// a single chart; all derivatives are central finite differences.

struct MetricField {
  int dim;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
  double h_fd = 1e-4;
  // constant fields skip all derivative terms exactly
  bool constant = false;

  static MetricField euclidean(int n);
  static MetricField constant_metric(Eigen::MatrixXd g);

  // Evaluate with validation: symmetric within 1e-12 and positive-definite.
  Eigen::MatrixXd at(const Eigen::VectorXd& x) const;
};

struct MapJet {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::MatrixXd jacobian;  // n2 x n1
  // n2 matrices of size n1 x n1, symmetric in the two derivative slots
  std::optional<std::vector<Eigen::MatrixXd>> hessian;

  int source_dim() const { return static_cast<int>(x.size()); }
  int target_dim() const { return static_cast<int>(u.size()); }
  void validate() const;
};

using MapField = std::function<MapJet(const Eigen::VectorXd&)>;

// Jet evaluator from a plain point map, derivatives by central differences.
MapField jet_from_map(int n1, int n2,
                      std::function<Eigen::VectorXd(const Eigen::VectorXd&)> u,
                      double h_fd = 1e-4, bool with_hessian = true);

struct FormField {
  int degree;
  std::function<KForm(const Eigen::VectorXd&)> eval;
  bool constant = false;
};

// Gamma[k](i,j) = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<Eigen::MatrixXd> christoffel(const MetricField& g,
                                         const Eigen::VectorXd& x);

// (u*h)_ij = h_ab(u(x)) du^a_i du^b_j.
Eigen::MatrixXd pullback_metric(const MapJet& J, const MetricField& h);

// |du|^2 = tr(g^{-1} u*h).
double du_norm_sq(const MapJet& J, const MetricField& g, const MetricField& h);

enum class SplitStatus { Regular, Critical, Degenerate };

struct SplitFrame {
  // columns, h(x)-orthonormal; vertical spans ker du, horizontal its
  // h-orthogonal complement
  Eigen::MatrixXd vertical;
  Eigen::MatrixXd horizontal;
  int rank = 0;
  SplitStatus status = SplitStatus::Regular;
  // metric at the split point, kept for type decompositions
  Eigen::MatrixXd metric;
};

// Kernel split of du with SVD rank decision (relative threshold) and the
// orientation conventions: du maps the horizontal frame to a positively
// oriented target basis, and vol_vertical ^ vol_horizontal = vol_M.
SplitFrame horizontal_split(const MapJet& J, const MetricField& h,
                            double rank_tol = 1e-8);

// (0,2) block of a symmetric bilinear form b: b restricted to the
// horizontal distribution, as an n x n matrix; trace w.r.t. the split
// metric equals the rank.
Eigen::MatrixXd horizontal_metric_block(const Eigen::MatrixXd& b,
                                        const SplitFrame& F);
Eigen::MatrixXd vertical_metric_block(const Eigen::MatrixXd& b,
                                      const SplitFrame& F);

// Decomposition by the number of vertical (p) and horizontal (q) slots;
// components sum to the input.  Works for forms and multivectors.
std::map<std::pair<int, int>, KTensor> type_decompose(const KTensor& a,
                                                      const SplitFrame& F);
KTensor type_component(const KTensor& a, const SplitFrame& F, int p, int q);

// Mass outside the (p,q) component.
double type_defect(const KTensor& a, const SplitFrame& F, int p, int q);

struct TypeLabel {
  int p;
  int q;
  double defect;  // mass outside the dominant component
};
TypeLabel dominant_type(const KTensor& a, const SplitFrame& F);

// (nabla_V alpha)_I = V^j d_j alpha_I - sum_m V^j Gamma^l_{j i_m}
// alpha_{i_1 .. l .. i_k}, central differences.
KForm covariant_derivative_form(const FormField& a, const MetricField& g,
                                const Eigen::VectorXd& V,
                                const Eigen::VectorXd& x);

// Divergence of a T*M1 (x) u*TM2 section B (columns j, rows a):
// (Div B)^a = g1^{ij} (d_i B_j^a - Gamma^l_{ij} B_l^a
//                      + Gamma2^a_{bc}(u(x)) d_i u^b B_j^c).
Eigen::VectorXd divergence_mixed(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& B,
    const MetricField& g1, const MetricField& g2, const MapField& u,
    const Eigen::VectorXd& x, double h_fd = 1e-3);

// Commutation defect | Div(Lambda^q(du) P) - Lambda^q(du)(Div P) | on flat
// euclidean charts.  P(x) is C(n1,q) x n1: column j holds the Lambda^q TM
// coefficients of P(e_j); P must be totally skew, i.e. P(v) = v hook beta
// for some (q+1)-form beta (checked, PreconditionError otherwise).
double div_lambda_commute_check(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& P,
    const MapField& u, int q, const Eigen::VectorXd& x, double h_fd = 1e-3,
    double skew_tol = 1e-10);

// JSON-lines jet batches: header {"n1":..,"n2":..}, then one jet per line
// {"x":[..],"u":[..],"J":[[..]],"H":[[[..]]]?}.
std::vector<MapJet> load_jets_jsonl(std::istream& in);
void save_jets_jsonl(std::ostream& out, const std::vector<MapJet>& jets);

}  // namespace smith
