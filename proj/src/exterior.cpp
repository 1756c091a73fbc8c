#include "smith/exterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace smith {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw DimensionError("ExtSpace dimension must be in [1, " +
                         std::to_string(kMaxDim) + "]");
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const MultiIndex& rows,
                          const MultiIndex& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = m(rows[i], cols[j]);
  return out;
}

double subdet(const Eigen::MatrixXd& m, const MultiIndex& rows,
              const MultiIndex& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  if (k == 1) return m(rows[0], cols[0]);
  if (k == 2)
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) -
           m(rows[0], cols[1]) * m(rows[1], cols[0]);
  return submatrix(m, rows, cols).determinant();
}

}  // namespace

ExtSpace::ExtSpace(int dim, int orientation)
    : dim_(dim),
      orientation_(orientation),
      euclidean_(true),
      metric_(Eigen::MatrixXd::Identity(dim, dim)),
      metric_inv_(Eigen::MatrixXd::Identity(dim, dim)),
      sqrt_det_(1.0) {
  check_dim(dim);
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("orientation must be +1 or -1");
}

ExtSpace::ExtSpace(int dim, Eigen::MatrixXd metric, int orientation)
    : dim_(dim), orientation_(orientation), metric_(std::move(metric)) {
  check_dim(dim);
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("orientation must be +1 or -1");
  if (metric_.rows() != dim || metric_.cols() != dim)
    throw DimensionError("metric shape does not match dimension");
  if ((metric_ - metric_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("metric is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(metric_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("metric is not positive-definite");
  metric_inv_ = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  double logdet = 0.0;
  for (int i = 0; i < dim; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  sqrt_det_ = std::exp(0.5 * logdet);
  euclidean_ =
      (metric_ - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0;
}

Eigen::MatrixXd ExtSpace::lambda_gram(const Eigen::MatrixXd& m, int k) {
  const int n = static_cast<int>(m.rows());
  const std::int64_t nk = binomial(n, k);
  Eigen::MatrixXd gram(nk, nk);
  std::vector<MultiIndex> subsets(nk);
  for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) { subsets[r] = I; });
  for (std::int64_t i = 0; i < nk; ++i)
    for (std::int64_t j = i; j < nk; ++j) {
      const double d = subdet(m, subsets[i], subsets[j]);
      gram(i, j) = d;
      gram(j, i) = d;
    }
  return gram;
}

bool ExtSpace::same_as(const ExtSpace& other, double tol) const {
  return dim_ == other.dim_ && orientation_ == other.orientation_ &&
         (metric_ - other.metric_).cwiseAbs().maxCoeff() <= tol;
}

KTensor::KTensor(ExtSpace space, int degree, Variance variance)
    : space_(std::move(space)), degree_(degree), variance_(variance) {
  if (degree < 0 || degree > space_.dim())
    throw DegreeError("degree must be in [0, dim]");
  coeffs_ = Eigen::VectorXd::Zero(binomial(space_.dim(), degree));
}

KTensor::KTensor(ExtSpace space, int degree, Variance variance,
                 Eigen::VectorXd coeffs)
    : KTensor(std::move(space), degree, variance) {
  if (coeffs.size() != coeffs_.size())
    throw DimensionError("coefficient count must equal C(n,k)");
  coeffs_ = std::move(coeffs);
}

double KTensor::coeff(const MultiIndex& idx) const {
  return coeffs_[colex_rank(idx)];
}

void KTensor::set_coeff(const MultiIndex& idx, double value) {
  coeffs_[colex_rank(idx)] = value;
}

double KTensor::evaluate(const Eigen::MatrixXd& vectors) const {
  if (vectors.rows() != space_.dim() || vectors.cols() != degree_)
    throw DimensionError("evaluation argument shape mismatch");
  double sum = 0.0;
  MultiIndex cols(degree_);
  for (int j = 0; j < degree_; ++j) cols[j] = j;
  for_each_subset(space_.dim(), degree_, [&](std::int64_t r, const MultiIndex& I) {
    if (coeffs_[r] != 0.0) {
      Eigen::MatrixXd sub(degree_, degree_);
      for (int i = 0; i < degree_; ++i) sub.row(i) = vectors.row(I[i]);
      sum += coeffs_[r] * (degree_ == 0 ? 1.0 : sub.determinant());
    }
  });
  return sum;
}

double KTensor::inner(const KTensor& other) const {
  if (degree_ != other.degree_ || variance_ != other.variance_ ||
      !space_.same_as(other.space_))
    throw DimensionError("inner product requires matching space and degree");
  if (space_.euclidean()) return coeffs_.dot(other.coeffs_);
  const Eigen::MatrixXd& m =
      variance_ == Variance::Form ? space_.metric_inverse() : space_.metric();
  return coeffs_.dot(ExtSpace::lambda_gram(m, degree_) * other.coeffs_);
}

double KTensor::norm() const { return std::sqrt(std::max(0.0, inner(*this))); }

KTensor& KTensor::operator+=(const KTensor& other) {
  if (degree_ != other.degree_ || !space_.same_as(other.space_))
    throw DimensionError("sum requires matching space and degree");
  coeffs_ += other.coeffs_;
  return *this;
}

KTensor& KTensor::operator-=(const KTensor& other) {
  if (degree_ != other.degree_ || !space_.same_as(other.space_))
    throw DimensionError("difference requires matching space and degree");
  coeffs_ -= other.coeffs_;
  return *this;
}

KTensor& KTensor::operator*=(double c) {
  coeffs_ *= c;
  return *this;
}

KForm make_form(ExtSpace space, int degree) {
  return KTensor(std::move(space), degree, Variance::Form);
}

KVector make_vector(ExtSpace space, int degree) {
  return KTensor(std::move(space), degree, Variance::Vector);
}

KForm basis_form(const ExtSpace& space, const MultiIndex& idx) {
  KForm a = make_form(space, static_cast<int>(idx.size()));
  a.set_coeff(idx, 1.0);
  return a;
}

KVector basis_vector(const ExtSpace& space, const MultiIndex& idx) {
  KVector a = make_vector(space, static_cast<int>(idx.size()));
  a.set_coeff(idx, 1.0);
  return a;
}

KForm volume_form(const ExtSpace& space) {
  KForm vol = make_form(space, space.dim());
  vol.coeffs()[0] = space.orientation() * space.sqrt_det_metric();
  return vol;
}

KTensor wedge(const KTensor& a, const KTensor& b) {
  if (!a.space().same_as(b.space()))
    throw DimensionError("wedge requires the same space");
  if (a.variance() != b.variance())
    throw DimensionError("wedge requires matching variance");
  const int n = a.space().dim();
  const int p = a.degree(), q = b.degree();
  if (p + q > n)
    throw DegreeError("wedge degree overflow: p + q > dim");
  KTensor out(a.space(), p + q, a.variance());
  std::vector<MultiIndex> bsets(binomial(n, q));
  for_each_subset(n, q, [&](std::int64_t r, const MultiIndex& J) { bsets[r] = J; });
  MultiIndex merged;
  for_each_subset(n, p, [&](std::int64_t ra, const MultiIndex& I) {
    if (a.coeffs()[ra] == 0.0) return;
    for (std::int64_t rb = 0; rb < static_cast<std::int64_t>(bsets.size()); ++rb) {
      if (b.coeffs()[rb] == 0.0) continue;
      const int sign = merge_sign(I, bsets[rb], &merged);
      if (sign != 0)
        out.coeffs()[colex_rank(merged)] += sign * a.coeffs()[ra] * b.coeffs()[rb];
    }
  });
  return out;
}

KTensor hodge_star(const KTensor& a) {
  const ExtSpace& sp = a.space();
  const int n = sp.dim();
  const int k = a.degree();
  // a ^ star(b) = <a,b> vol on forms; the multivector star mirrors it.
  const double s = sp.orientation() * (a.variance() == Variance::Form
                                           ? sp.sqrt_det_metric()
                                           : 1.0 / sp.sqrt_det_metric());
  KTensor out(sp, n - k, a.variance());
  Eigen::VectorXd metric_coeffs;
  if (sp.euclidean()) {
    metric_coeffs = a.coeffs();
  } else {
    const Eigen::MatrixXd& m = a.variance() == Variance::Form
                                   ? sp.metric_inverse()
                                   : sp.metric();
    metric_coeffs = ExtSpace::lambda_gram(m, k) * a.coeffs();
  }
  for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) {
    if (metric_coeffs[r] == 0.0) return;
    MultiIndex comp = complement(I, n);
    const int sign = complement_sign(I, n);
    out.coeffs()[colex_rank(comp)] += sign * s * metric_coeffs[r];
  });
  return out;
}

KTensor interior(const Eigen::VectorXd& v, const KTensor& a) {
  if (a.degree() < 1) throw DegreeError("interior product requires degree >= 1");
  if (v.size() != a.space().dim())
    throw DimensionError("interior product vector dimension mismatch");
  const int n = a.space().dim();
  const int k = a.degree();
  KTensor out(a.space(), k - 1, a.variance());
  MultiIndex sub;
  for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) {
    if (a.coeffs()[r] == 0.0) return;
    for (int pos = 0; pos < k; ++pos) {
      if (v[I[pos]] == 0.0) continue;
      sub = I;
      sub.erase(sub.begin() + pos);
      const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
      out.coeffs()[colex_rank(sub)] += sign * v[I[pos]] * a.coeffs()[r];
    }
  });
  return out;
}

KForm lower(const KVector& w) {
  if (w.variance() != Variance::Vector)
    throw std::invalid_argument("lower expects a multivector");
  Eigen::VectorXd c = w.space().euclidean()
                          ? w.coeffs()
                          : Eigen::VectorXd(ExtSpace::lambda_gram(
                                w.space().metric(), w.degree()) * w.coeffs());
  return KTensor(w.space(), w.degree(), Variance::Form, std::move(c));
}

KVector raise(const KForm& a) {
  if (a.variance() != Variance::Form)
    throw std::invalid_argument("raise expects a form");
  Eigen::VectorXd c = a.space().euclidean()
                          ? a.coeffs()
                          : Eigen::VectorXd(ExtSpace::lambda_gram(
                                a.space().metric_inverse(), a.degree()) * a.coeffs());
  return KTensor(a.space(), a.degree(), Variance::Vector, std::move(c));
}

LinearMap::LinearMap(ExtSpace src, ExtSpace tgt, Eigen::MatrixXd m)
    : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
  if (matrix.rows() != target.dim() || matrix.cols() != source.dim())
    throw DimensionError("LinearMap matrix must be target_dim x source_dim");
}

double LinearMap::norm_sq() const {
  return (source.metric_inverse() * matrix.transpose() * target.metric() * matrix)
      .trace();
}

Eigen::MatrixXd lambda_k(const LinearMap& A, int k) {
  const int n1 = A.source.dim(), n2 = A.target.dim();
  const std::int64_t rows = binomial(n2, k), cols = binomial(n1, k);
  if (k < 0 || k > n1 || k > n2)
    return Eigen::MatrixXd::Zero(std::max<std::int64_t>(rows, 0),
                                 std::max<std::int64_t>(cols, 0));
  Eigen::MatrixXd out(rows, cols);
  std::vector<MultiIndex> colsets(cols);
  for_each_subset(n1, k, [&](std::int64_t r, const MultiIndex& I) { colsets[r] = I; });
  for_each_subset(n2, k, [&](std::int64_t rj, const MultiIndex& J) {
    for (std::int64_t ri = 0; ri < cols; ++ri)
      out(rj, ri) = subdet(A.matrix, J, colsets[ri]);
  });
  return out;
}

KVector lambda_k_apply(const LinearMap& A, const KVector& w) {
  const int k = w.degree();
  if (!w.space().same_as(A.source))
    throw DimensionError("lambda_k_apply: multivector not on source space");
  if (k > A.target.dim())
    return make_vector(A.target, A.target.dim());  // degenerate; unused
  return KTensor(A.target, k, Variance::Vector,
                 Eigen::VectorXd(lambda_k(A, k) * w.coeffs()));
}

KForm pullback(const LinearMap& A, const KForm& a) {
  const int k = a.degree();
  if (!a.space().same_as(A.target))
    throw DimensionError("pullback: form not on target space");
  if (k > A.source.dim())
    throw DegreeError("pullback: degree exceeds source dimension");
  return KTensor(A.source, k, Variance::Form,
                 Eigen::VectorXd(lambda_k(A, k).transpose() * a.coeffs()));
}

HadamardResult hadamard_check(const LinearMap& A) {
  const int n1 = A.source.dim(), n2 = A.target.dim();
  HadamardResult res{};
  res.rank_deficient = n1 > n2;
  const double norm_sq = A.norm_sq();
  res.rhs = std::pow(norm_sq / n1, 0.5 * n1);
  if (res.rank_deficient) {
    res.lhs = 0.0;
  } else {
    // |Lambda^{n1} A (unit source n1-vector)| in the target Lambda^{n1} metric.
    Eigen::VectorXd minors = lambda_k(A, n1).col(0);
    const Eigen::MatrixXd gram = A.target.euclidean()
                                     ? Eigen::MatrixXd::Identity(minors.size(),
                                                                 minors.size())
                                     : ExtSpace::lambda_gram(A.target.metric(), n1);
    const double source_top_sq = A.source.euclidean()
                                     ? 1.0
                                     : A.source.metric().determinant();
    res.lhs = std::sqrt(std::max(0.0, minors.dot(gram * minors) / source_top_sq));
  }
  const Eigen::MatrixXd pulled =
      A.matrix.transpose() * A.target.metric() * A.matrix;
  res.conformal_defect =
      (pulled - (norm_sq / n1) * A.source.metric()).norm();
  return res;
}

}  // namespace smith
