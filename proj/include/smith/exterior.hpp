#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "smith/multiindex.hpp"

namespace smith {

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegreeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Oriented inner product space R^n with a fixed SPD metric.
// The orientation sign is attached to the coordinate top form e^{1...n}.
class ExtSpace {
 public:
  explicit ExtSpace(int dim, int orientation = +1);
  ExtSpace(int dim, Eigen::MatrixXd metric, int orientation = +1);

  int dim() const { return dim_; }
  int orientation() const { return orientation_; }
  const Eigen::MatrixXd& metric() const { return metric_; }
  const Eigen::MatrixXd& metric_inverse() const { return metric_inv_; }
  double sqrt_det_metric() const { return sqrt_det_; }
  bool euclidean() const { return euclidean_; }

  // Gram matrix on Lambda^k induced by m: G_{IJ} = det(m[I,J]).
  // Callers pass metric() for multivectors and metric_inverse() for forms.
  static Eigen::MatrixXd lambda_gram(const Eigen::MatrixXd& m, int k);

  bool same_as(const ExtSpace& other, double tol = 1e-12) const;

 private:
  int dim_;
  int orientation_;
  bool euclidean_;
  Eigen::MatrixXd metric_, metric_inv_;
  double sqrt_det_;
};

enum class Variance { Form, Vector };

// Alternating degree-k tensor with dense coefficients over the C(n,k)
// increasing multi-indices in colex order.  The variance tag records
// whether inner products use g^{-1} (forms) or g (multivectors).
class KTensor {
 public:
  KTensor(ExtSpace space, int degree, Variance variance);
  KTensor(ExtSpace space, int degree, Variance variance, Eigen::VectorXd coeffs);

  const ExtSpace& space() const { return space_; }
  int degree() const { return degree_; }
  Variance variance() const { return variance_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double coeff(const MultiIndex& idx) const;
  void set_coeff(const MultiIndex& idx, double value);

  // Full alternating evaluation on degree() column vectors.
  double evaluate(const Eigen::MatrixXd& vectors) const;

  double inner(const KTensor& other) const;
  double norm() const;

  KTensor& operator+=(const KTensor& other);
  KTensor& operator-=(const KTensor& other);
  KTensor& operator*=(double c);
  friend KTensor operator+(KTensor a, const KTensor& b) { return a += b; }
  friend KTensor operator-(KTensor a, const KTensor& b) { return a -= b; }
  friend KTensor operator*(double c, KTensor a) { return a *= c; }

 private:
  ExtSpace space_;
  int degree_;
  Variance variance_;
  Eigen::VectorXd coeffs_;
};

using KForm = KTensor;
using KVector = KTensor;

KForm make_form(ExtSpace space, int degree);
KVector make_vector(ExtSpace space, int degree);

// Basis form e^{i_1} ^ ... ^ e^{i_k} (indices 0-based, strictly increasing).
KForm basis_form(const ExtSpace& space, const MultiIndex& idx);
KVector basis_vector(const ExtSpace& space, const MultiIndex& idx);

// Riemannian volume form: orientation * sqrt(det g) e^{1...n}.
KForm volume_form(const ExtSpace& space);

KTensor wedge(const KTensor& a, const KTensor& b);

// a ^ star(b) = <a,b> vol.  Works for both variances.
KTensor hodge_star(const KTensor& a);

// Metric-free contraction (i_v a)(w_1,...,w_{k-1}) = a(v, w_1,...,w_{k-1}).
KTensor interior(const Eigen::VectorXd& v, const KTensor& a);

// Musical isomorphisms on Lambda^k.
KForm lower(const KVector& w);
KVector raise(const KForm& a);

// Linear map between two spaces; matrix is target_dim x source_dim.
struct LinearMap {
  ExtSpace source;
  ExtSpace target;
  Eigen::MatrixXd matrix;

  LinearMap(ExtSpace src, ExtSpace tgt, Eigen::MatrixXd m);

  // Hilbert-Schmidt norm squared: tr(g1^{-1} A^T g2 A).
  double norm_sq() const;
};

// Matrix of Lambda^k A on the colex bases: entry (J, I) = det A[J, I].
// For k > min(n1, n2) this is the zero map (0-row or 0-column cases are
// handled by convention: C(n,k) = 0 never occurs since k <= n is required
// per side separately; out-of-range k yields a zero matrix).
Eigen::MatrixXd lambda_k(const LinearMap& A, int k);

// Pushforward of a multivector along A.
KVector lambda_k_apply(const LinearMap& A, const KVector& w);

// Pullback of a form along A.
KForm pullback(const LinearMap& A, const KForm& a);

struct HadamardResult {
  double lhs;               // |Lambda^{n1} A|
  double rhs;               // |A|^{n1} / sqrt(n1)^{n1}
  double conformal_defect;  // || A*g2 - (|A|^2/n1) g1 ||_F
  bool rank_deficient;      // n1 > n2, so lhs is identically zero
};

HadamardResult hadamard_check(const LinearMap& A);

}  // namespace smith
