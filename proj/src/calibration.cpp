#include "smith/calibration.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "json.hpp"

namespace smith {

namespace {

KForm associative_phi0() {
  // phi_0 = e123 + e145 + e167 + e246 - e257 - e347 - e356
  // (indices 1-based here, 0-based in code; see docs/conventions.md)
  ExtSpace r7(7);
  KForm phi = make_form(r7, 3);
  phi.set_coeff({0, 1, 2}, 1.0);
  phi.set_coeff({0, 3, 4}, 1.0);
  phi.set_coeff({0, 5, 6}, 1.0);
  phi.set_coeff({1, 3, 5}, 1.0);
  phi.set_coeff({1, 4, 6}, -1.0);
  phi.set_coeff({2, 3, 6}, -1.0);
  phi.set_coeff({2, 4, 5}, -1.0);
  return phi;
}

KForm kaehler_omega(int n) {
  if (n % 2 != 0 || n < 2)
    throw std::invalid_argument("kaehler form needs even dimension");
  ExtSpace sp(n);
  KForm omega = make_form(sp, 2);
  for (int j = 0; j < n / 2; ++j) omega.set_coeff({2 * j, 2 * j + 1}, 1.0);
  return omega;
}

KForm special_lagrangian_re(int n) {
  if (n % 2 != 0 || n < 2)
    throw std::invalid_argument("special lagrangian form needs even dimension");
  ExtSpace sp(n);
  // Re and Im of the product of complex one-forms e^{2j-1} + i e^{2j}.
  KForm re = make_form(sp, 0);
  re.coeffs()[0] = 1.0;
  KForm im = make_form(sp, 0);
  for (int j = 0; j < n / 2; ++j) {
    KForm ex = basis_form(sp, {2 * j});
    KForm ey = basis_form(sp, {2 * j + 1});
    KForm new_re = wedge(re, ex) - wedge(im, ey);
    KForm new_im = wedge(re, ey) + wedge(im, ex);
    re = new_re;
    im = new_im;
  }
  return re;
}

// Euclidean gradient of F(V) = alpha(v_1,...,v_k) with respect to column j:
// component i is alpha(v_1,...,e_i,...,v_k).
Eigen::MatrixXd frame_gradient(const KForm& form, const Eigen::MatrixXd& V) {
  const int n = form.space().dim();
  const int k = form.degree();
  Eigen::MatrixXd grad(n, k);
  KForm front = form;  // i_{v_{j-1}} ... i_{v_1} alpha, built incrementally
  for (int j = 0; j < k; ++j) {
    KForm partial = front;
    for (int m = j + 1; m < k; ++m) partial = interior(V.col(m), partial);
    const double sign = ((k - 1 - j) % 2 == 0) ? 1.0 : -1.0;
    grad.col(j) = sign * partial.coeffs();
    if (j + 1 < k) front = interior(V.col(j), front);
  }
  return grad;
}

Eigen::MatrixXd qr_retract(const Eigen::MatrixXd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::MatrixXd Q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(X.rows(), X.cols());
  Eigen::MatrixXd R = Q.transpose() * X;
  for (int j = 0; j < X.cols(); ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

}  // namespace

OrientedFrame make_orthonormal_frame(const ExtSpace& space,
                                     Eigen::MatrixXd vectors, double tol) {
  if (vectors.rows() != space.dim())
    throw DimensionError("frame vectors must live in the space");
  Eigen::MatrixXd gram = vectors.transpose() * space.metric() * vectors;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
          .cwiseAbs()
          .maxCoeff();
  return OrientedFrame{std::move(vectors), defect <= tol};
}

CalibrationForm standard_form(const std::string& name, int n) {
  if (name == "kaehler") {
    return {kaehler_omega(n), name, ComassCertificate{1.0, 0.0}};
  }
  if (name.rfind("kaehler-power", 0) == 0) {
    int p = 2;
    if (auto pos = name.find(':'); pos != std::string::npos)
      p = std::stoi(name.substr(pos + 1));
    KForm omega = kaehler_omega(n);
    KForm power = make_form(omega.space(), 0);
    power.coeffs()[0] = 1.0;
    double factorial = 1.0;
    for (int i = 1; i <= p; ++i) {
      power = wedge(power, omega);
      factorial *= i;
    }
    return {(1.0 / factorial) * power, name, ComassCertificate{1.0, 0.0}};
  }
  if (name == "special-lagrangian") {
    return {special_lagrangian_re(n), name, ComassCertificate{1.0, 0.0}};
  }
  if (name == "associative") {
    if (n != 7) throw std::invalid_argument("associative form lives on R^7");
    return {associative_phi0(), name, ComassCertificate{1.0, 0.0}};
  }
  if (name == "coassociative") {
    if (n != 7) throw std::invalid_argument("coassociative form lives on R^7");
    return {hodge_star(associative_phi0()), name, ComassCertificate{1.0, 0.0}};
  }
  if (name == "cayley") {
    if (n != 8) throw std::invalid_argument("cayley form lives on R^8");
    ExtSpace r8(8);
    KForm phi7 = associative_phi0();
    KForm psi7 = hodge_star(phi7);
    // embed the R^7 tables into R^8 (indices 0..6 untouched)
    KForm phi8 = make_form(r8, 3);
    for_each_subset(7, 3, [&](std::int64_t, const MultiIndex& I) {
      phi8.set_coeff(I, phi7.coeff(I));
    });
    KForm psi8 = make_form(r8, 4);
    for_each_subset(7, 4, [&](std::int64_t, const MultiIndex& I) {
      psi8.set_coeff(I, psi7.coeff(I));
    });
    KForm cayley = wedge(basis_form(r8, {7}), phi8) + psi8;
    return {cayley, name, ComassCertificate{1.0, 0.0}};
  }
  throw std::invalid_argument("unknown standard calibration: " + name);
}

ComassEstimate comass_estimate(const KForm& form, int restarts, double tol,
                               std::uint64_t seed) {
  if (restarts <= 0)
    throw std::invalid_argument("comass_estimate requires restarts >= 1");
  if (form.degree() < 1)
    throw DegreeError("comass of a 0-form is its absolute value; degree >= 1 required");
  if (!form.space().euclidean())
    throw std::invalid_argument("comass_estimate expects a euclidean model space");
  const int n = form.space().dim();
  const int k = form.degree();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  double best = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_frame;
  const double grad_tol = std::min(tol, 1e-9);

  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd X(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) X(i, j) = gauss(rng);
    X = qr_retract(X);

    double f = form.evaluate(X);
    double t = 1.0;  // step carried across iterations
    for (int iter = 0; iter < 2000; ++iter) {
      Eigen::MatrixXd G = frame_gradient(form, X);
      // project to the Stiefel tangent space at X
      Eigen::MatrixXd XtG = X.transpose() * G;
      Eigen::MatrixXd Gr = G - X * (0.5 * (XtG + XtG.transpose()));
      const double gn2 = Gr.squaredNorm();
      if (gn2 <= grad_tol * grad_tol) break;
      t = std::min(t * 4.0, 1e6);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Eigen::MatrixXd Y = qr_retract(X + t * Gr);
        const double fy = form.evaluate(Y);
        // a generous sufficient-increase constant: with c = 1e-4 the search
        // accepts overshooting steps that stall just below the maximum
        if (fy >= f + 0.3 * t * gn2) {
          X = Y;
          f = fy;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    if (f > best) {
      best = f;
      best_frame = X;
    }
  }
  return ComassEstimate{best, best_frame, restarts};
}

PlaneCheck is_calibrated_plane(const KForm& form, const OrientedFrame& frame,
                               double tol) {
  if (!frame.orthonormal)
    throw PreconditionError("is_calibrated_plane requires an orthonormal frame");
  if (frame.vectors.cols() != form.degree())
    throw DimensionError("frame size must equal the form degree");
  const double value = form.evaluate(frame.vectors);
  return PlaneCheck{value, std::abs(value - 1.0) <= tol};
}

double first_cousin_check(const KForm& form, const OrientedFrame& frame,
                          Eigen::VectorXd w, double frame_tol) {
  const int k = form.degree();
  auto check = is_calibrated_plane(form, frame, frame_tol);
  if (!check.calibrated)
    throw PreconditionError("first cousin principle needs a calibrated frame");
  if (w.size() != frame.vectors.rows())
    throw DimensionError("w dimension mismatch");
  // project w off span(frame) and renormalize; w = 0 stays 0
  const Eigen::MatrixXd& g = form.space().metric();
  for (int j = 0; j < frame.vectors.cols(); ++j) {
    const Eigen::VectorXd e = frame.vectors.col(j);
    w -= (e.transpose() * g * w)(0) * e;
  }
  const double wn = std::sqrt((w.transpose() * g * w)(0));
  if (wn > 0) w /= wn;
  Eigen::MatrixXd args(frame.vectors.rows(), k);
  args.leftCols(k - 1) = frame.vectors.leftCols(k - 1);
  args.col(k - 1) = w;
  return form.evaluate(args);
}

Eigen::VectorXd p_alpha(const KForm& form, const KVector& w) {
  if (w.degree() != form.degree() - 1)
    throw DegreeError("p_alpha: multivector degree must be k-1");
  if (!w.space().same_as(form.space()))
    throw DimensionError("p_alpha: space mismatch");
  const int n = form.space().dim();
  Eigen::VectorXd c(n);
  for (int j = 0; j < n; ++j) {
    KVector wj = wedge(w, basis_vector(form.space(), {j}));
    c[j] = form.coeffs().dot(wj.coeffs());
  }
  return form.space().metric_inverse() * c;
}

KVector p_alpha_adjoint(const KForm& form, const Eigen::VectorXd& v) {
  if (form.degree() < 1) throw DegreeError("p_alpha_adjoint requires degree >= 1");
  const double sign = (form.degree() % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k-1}
  return sign * raise(interior(v, form));
}

double pp_top_check(const KForm& form, const Eigen::MatrixXd& horizontal,
                    double type_tol) {
  const ExtSpace& sp = form.space();
  const int n = sp.dim();
  const int k = form.degree();
  if (horizontal.rows() != n || horizontal.cols() != k)
    throw DimensionError("horizontal frame must be n x k");
  const Eigen::MatrixXd& g = sp.metric();

  // vertical directions: g-orthogonal complement of the horizontal span
  Eigen::MatrixXd ht_g = horizontal.transpose() * g;  // k x n
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ht_g);
  Eigen::MatrixXd vertical = lu.kernel();
  const double scale = 1.0 + form.norm();
  for (int j = 0; j < vertical.cols(); ++j) {
    KForm hooked = interior(vertical.col(j).normalized(), form);
    if (hooked.norm() > type_tol * scale)
      throw PreconditionError("pp_top_check: form is not of type (0,k)");
  }

  // P P^T on the coordinate basis
  Eigen::MatrixXd op(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
    ej[j] = 1.0;
    op.col(j) = p_alpha(form, p_alpha_adjoint(form, ej));
  }
  const Eigen::MatrixXd proj =
      horizontal * (horizontal.transpose() * g * horizontal).inverse() *
      horizontal.transpose() * g;
  const double norm_sq = form.inner(form);
  return (op - norm_sq * proj).jacobiSvd().singularValues()(0);
}

CalibrationForm load_form_json(const std::string& json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text);
  const int dim = doc.at("dim").get<int>();
  const int degree = doc.at("degree").get<int>();
  ExtSpace sp(dim);
  KForm form = make_form(sp, degree);
  std::vector<bool> seen(form.coeffs().size(), false);
  for (const auto& term : doc.at("terms")) {
    MultiIndex idx;
    for (int i : term.at("indices").get<std::vector<int>>()) {
      if (i < 1 || i > dim)
        throw std::invalid_argument("form index out of range (1-based)");
      idx.push_back(i - 1);
    }
    if (static_cast<int>(idx.size()) != degree)
      throw std::invalid_argument("term index count must equal degree");
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i] <= idx[i - 1])
        throw std::invalid_argument("form indices must be strictly increasing");
    const std::int64_t rank = colex_rank(idx);
    if (seen[rank]) throw std::invalid_argument("duplicate term indices");
    seen[rank] = true;
    form.coeffs()[rank] = term.at("coeff").get<double>();
  }
  std::string name = doc.value("name", "custom");
  return CalibrationForm{std::move(form), std::move(name), std::nullopt};
}

std::string form_to_json(const CalibrationForm& cal) {
  nlohmann::json doc;
  doc["dim"] = cal.form.space().dim();
  doc["degree"] = cal.form.degree();
  doc["name"] = cal.name;
  doc["terms"] = nlohmann::json::array();
  for_each_subset(cal.form.space().dim(), cal.form.degree(),
                  [&](std::int64_t r, const MultiIndex& I) {
    if (cal.form.coeffs()[r] == 0.0) return;
    std::vector<int> one_based;
    for (int i : I) one_based.push_back(i + 1);
    doc["terms"].push_back(
        {{"indices", one_based}, {"coeff", cal.form.coeffs()[r]}});
  });
  return doc.dump(2);
}

}  // namespace smith
