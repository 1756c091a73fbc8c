#include "smith/geometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

#include "json.hpp"

namespace smith {

namespace {

// Coefficient of a dense alternating tensor at an arbitrary (possibly
// unsorted) index list: 0 on repeats, otherwise signed lookup.
double signed_coeff(const Eigen::VectorXd& coeffs, MultiIndex idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0.0;
  return sign * coeffs[colex_rank(idx)];
}

// Gram-Schmidt w.r.t. the bilinear form h, with one re-orthogonalization
// pass for stability; columns spanning (numerically) nothing are dropped.
Eigen::MatrixXd h_orthonormalize(const Eigen::MatrixXd& cols,
                                 const Eigen::MatrixXd& h) {
  Eigen::MatrixXd out(cols.rows(), cols.cols());
  int kept = 0;
  for (int j = 0; j < cols.cols(); ++j) {
    Eigen::VectorXd v = cols.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < kept; ++i)
        v -= (out.col(i).dot(h * v)) * out.col(i);
    const double nrm = std::sqrt(v.dot(h * v));
    if (nrm < 1e-12 * (1.0 + cols.col(j).norm())) continue;
    out.col(kept++) = v / nrm;
  }
  return out.leftCols(kept);
}

}  // namespace

MetricField MetricField::euclidean(int n) {
  return constant_metric(Eigen::MatrixXd::Identity(n, n));
}

MetricField MetricField::constant_metric(Eigen::MatrixXd g) {
  const int n = static_cast<int>(g.rows());
  MetricField f;
  f.dim = n;
  f.eval = [g = std::move(g)](const Eigen::VectorXd&) { return g; };
  f.constant = true;
  return f;
}

Eigen::MatrixXd MetricField::at(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd g = eval(x);
  if (g.rows() != dim || g.cols() != dim)
    throw DimensionError("metric evaluator returned wrong shape");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.norm()))
    throw PreconditionError("metric not symmetric at queried point");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw PreconditionError("metric not positive-definite at queried point");
  return g;
}

void MapJet::validate() const {
  if (jacobian.rows() != target_dim() || jacobian.cols() != source_dim())
    throw DimensionError("jet jacobian shape mismatch");
  if (hessian) {
    if (static_cast<int>(hessian->size()) != target_dim())
      throw DimensionError("jet hessian count mismatch");
    for (const auto& H : *hessian) {
      if (H.rows() != source_dim() || H.cols() != source_dim())
        throw DimensionError("jet hessian shape mismatch");
      if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H.norm()))
        throw PreconditionError("jet hessian not symmetric");
    }
  }
}

MapField jet_from_map(int n1, int n2,
                      std::function<Eigen::VectorXd(const Eigen::VectorXd&)> u,
                      double h_fd, bool with_hessian) {
  return [=, u = std::move(u)](const Eigen::VectorXd& x) {
    MapJet jet;
    jet.x = x;
    jet.u = u(x);
    if (jet.u.size() != n2)
      throw DimensionError("map evaluator returned wrong target dimension");
    jet.jacobian.resize(n2, n1);
    for (int i = 0; i < n1; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h_fd;
      xm[i] -= h_fd;
      jet.jacobian.col(i) = (u(xp) - u(xm)) / (2.0 * h_fd);
    }
    if (with_hessian) {
      std::vector<Eigen::MatrixXd> H(n2, Eigen::MatrixXd(n1, n1));
      const Eigen::VectorXd u0 = jet.u;
      for (int i = 0; i < n1; ++i) {
        for (int j = i; j < n1; ++j) {
          Eigen::VectorXd d;
          if (i == j) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h_fd;
            xm[i] -= h_fd;
            d = (u(xp) - 2.0 * u0 + u(xm)) / (h_fd * h_fd);
          } else {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h_fd; xpp[j] += h_fd;
            xpm[i] += h_fd; xpm[j] -= h_fd;
            xmp[i] -= h_fd; xmp[j] += h_fd;
            xmm[i] -= h_fd; xmm[j] -= h_fd;
            d = (u(xpp) - u(xpm) - u(xmp) + u(xmm)) / (4.0 * h_fd * h_fd);
          }
          for (int a = 0; a < n2; ++a) {
            H[a](i, j) = d[a];
            H[a](j, i) = d[a];
          }
        }
      }
      jet.hessian = std::move(H);
    }
    return jet;
  };
}

std::vector<Eigen::MatrixXd> christoffel(const MetricField& g,
                                         const Eigen::VectorXd& x) {
  const int n = g.dim;
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  if (g.constant) return gamma;
  const Eigen::MatrixXd g0 = g.at(x);
  const Eigen::MatrixXd ginv = g0.inverse();
  const double h = g.h_fd;
  std::vector<Eigen::MatrixXd> dg(n);
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dg[l] = (g.at(xp) - g.at(xm)) / (2.0 * h);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
        gamma[k](j, i) = gamma[k](i, j);
      }
  return gamma;
}

Eigen::MatrixXd pullback_metric(const MapJet& J, const MetricField& h) {
  const Eigen::MatrixXd ht = h.at(J.u);
  return J.jacobian.transpose() * ht * J.jacobian;
}

double du_norm_sq(const MapJet& J, const MetricField& g,
                  const MetricField& h) {
  const Eigen::MatrixXd gs = g.at(J.x);
  return (gs.ldlt().solve(pullback_metric(J, h))).trace();
}

SplitFrame horizontal_split(const MapJet& J, const MetricField& h,
                            double rank_tol) {
  const int n = J.source_dim();
  const int m = J.target_dim();
  const Eigen::MatrixXd hx = h.at(J.x);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      J.jacobian, Eigen::ComputeFullV | Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol * smax && smax > 0.0) ++r;

  SplitFrame F;
  F.rank = r;
  F.metric = hx;
  if (r == 0) {
    F.status = SplitStatus::Critical;
    F.vertical = h_orthonormalize(Eigen::MatrixXd::Identity(n, n), hx);
    F.horizontal.resize(n, 0);
    return F;
  }
  F.status = (r == std::min(n, m)) ? SplitStatus::Regular
                                   : SplitStatus::Degenerate;

  const Eigen::MatrixXd V = svd.matrixV();
  F.vertical = h_orthonormalize(V.rightCols(n - r), hx);
  // horizontal = h-orthocomplement of the kernel inside the full chart frame
  Eigen::MatrixXd cand(n, n);
  cand.leftCols(r) = V.leftCols(r);
  cand.rightCols(n - r) = Eigen::MatrixXd::Identity(n, n).leftCols(n - r);
  for (int j = 0; j < cand.cols(); ++j)
    for (int i = 0; i < F.vertical.cols(); ++i)
      cand.col(j) -=
          (F.vertical.col(i).dot(hx * cand.col(j))) * F.vertical.col(i);
  F.horizontal = h_orthonormalize(cand, hx).leftCols(r);

  // orient: du(horizontal frame) positively oriented in the target chart
  if (r == m) {
    const double det = (J.jacobian * F.horizontal).determinant();
    if (det < 0.0) F.horizontal.col(r - 1) *= -1.0;
  }
  // orient: vol_vertical ^ vol_horizontal = vol_M
  if (n > r) {
    Eigen::MatrixXd frame(n, n);
    frame.leftCols(n - r) = F.vertical;
    frame.rightCols(r) = F.horizontal;
    ExtSpace sp(n, hx);
    if (volume_form(sp).evaluate(frame) < 0.0) F.vertical.col(n - r - 1) *= -1.0;
  }
  return F;
}

Eigen::MatrixXd horizontal_metric_block(const Eigen::MatrixXd& b,
                                        const SplitFrame& F) {
  const Eigen::MatrixXd proj = F.horizontal * F.horizontal.transpose() * F.metric;
  return proj.transpose() * b * proj;
}

Eigen::MatrixXd vertical_metric_block(const Eigen::MatrixXd& b,
                                      const SplitFrame& F) {
  const Eigen::MatrixXd proj = F.vertical * F.vertical.transpose() * F.metric;
  return proj.transpose() * b * proj;
}

std::map<std::pair<int, int>, KTensor> type_decompose(const KTensor& a,
                                                      const SplitFrame& F) {
  const int n = a.space().dim();
  const int nv = static_cast<int>(F.vertical.cols());
  if (nv + F.horizontal.cols() != n)
    throw DimensionError("split does not span the chart space");
  Eigen::MatrixXd E(n, n);
  E.leftCols(nv) = F.vertical;
  E.rightCols(n - nv) = F.horizontal;
  const Eigen::MatrixXd Einv = E.inverse();
  const ExtSpace frame_space(n);

  KTensor hat = (a.variance() == Variance::Form)
                    ? pullback(LinearMap(frame_space, a.space(), E), a)
                    : lambda_k_apply(LinearMap(a.space(), frame_space, Einv), a);

  std::map<std::pair<int, int>, KTensor> out;
  const int k = a.degree();
  for (int p = std::max(0, k - (n - nv)); p <= std::min(k, nv); ++p) {
    Eigen::VectorXd masked = Eigen::VectorXd::Zero(hat.coeffs().size());
    for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) {
      int verts = 0;
      for (int i : I)
        if (i < nv) ++verts;
      if (verts == p) masked[r] = hat.coeffs()[r];
    });
    KTensor comp_hat(frame_space, k, a.variance(), std::move(masked));
    KTensor comp =
        (a.variance() == Variance::Form)
            ? pullback(LinearMap(a.space(), frame_space, Einv), comp_hat)
            : lambda_k_apply(LinearMap(frame_space, a.space(), E), comp_hat);
    out.emplace(std::make_pair(p, k - p), std::move(comp));
  }
  return out;
}

KTensor type_component(const KTensor& a, const SplitFrame& F, int p, int q) {
  if (p + q != a.degree()) throw DegreeError("type (p,q) must sum to degree");
  auto parts = type_decompose(a, F);
  auto it = parts.find({p, q});
  if (it != parts.end()) return it->second;
  return KTensor(a.space(), a.degree(), a.variance());
}

double type_defect(const KTensor& a, const SplitFrame& F, int p, int q) {
  if (p + q != a.degree()) throw DegreeError("type (p,q) must sum to degree");
  double off = 0.0;
  for (const auto& [pq, comp] : type_decompose(a, F))
    if (pq != std::make_pair(p, q)) off = std::hypot(off, comp.norm());
  return off;
}

TypeLabel dominant_type(const KTensor& a, const SplitFrame& F) {
  auto parts = type_decompose(a, F);
  TypeLabel best{0, a.degree(), 0.0};
  double best_norm = -1.0;
  for (const auto& [pq, comp] : parts) {
    const double nrm = comp.norm();
    if (nrm > best_norm) {
      best_norm = nrm;
      best.p = pq.first;
      best.q = pq.second;
    }
  }
  double off = 0.0;
  for (const auto& [pq, comp] : parts)
    if (pq != std::make_pair(best.p, best.q)) off = std::hypot(off, comp.norm());
  best.defect = off;
  return best;
}

KForm covariant_derivative_form(const FormField& a, const MetricField& g,
                                const Eigen::VectorXd& V,
                                const Eigen::VectorXd& x) {
  const KForm a0 = a.eval(x);
  const int n = a0.space().dim();
  const int k = a0.degree();
  const double h = g.h_fd;

  Eigen::VectorXd deriv = Eigen::VectorXd::Zero(a0.coeffs().size());
  if (!a.constant) {
    for (int j = 0; j < n; ++j) {
      if (V[j] == 0.0) continue;
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      deriv += V[j] * (a.eval(xp).coeffs() - a.eval(xm).coeffs()) / (2.0 * h);
    }
  }
  const auto gamma = christoffel(g, x);
  Eigen::VectorXd out = deriv;
  for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) {
    double corr = 0.0;
    for (int j = 0; j < n; ++j) {
      if (V[j] == 0.0) continue;
      for (int m = 0; m < k; ++m) {
        MultiIndex repl = I;
        for (int l = 0; l < n; ++l) {
          const double G = gamma[l](j, I[m]);
          if (G == 0.0) continue;
          repl[m] = l;
          corr += V[j] * G * signed_coeff(a0.coeffs(), repl);
        }
        repl[m] = I[m];
      }
    }
    out[r] -= corr;
  });
  return KForm(a0.space(), k, Variance::Form, std::move(out));
}

Eigen::VectorXd divergence_mixed(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& B,
    const MetricField& g1, const MetricField& g2, const MapField& u,
    const Eigen::VectorXd& x, double h_fd) {
  const int n1 = g1.dim;
  const int n2 = g2.dim;
  const MapJet jet = u(x);
  const Eigen::MatrixXd ginv = g1.at(x).inverse();
  const Eigen::MatrixXd B0 = B(x);
  if (B0.rows() != n2 || B0.cols() != n1)
    throw DimensionError("mixed tensor field has wrong shape");
  const auto gamma1 = christoffel(g1, x);
  const auto gamma2 = christoffel(g2, jet.u);

  std::vector<Eigen::MatrixXd> dB(n1);
  for (int i = 0; i < n1; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h_fd;
    xm[i] -= h_fd;
    dB[i] = (B(xp) - B(xm)) / (2.0 * h_fd);
  }

  Eigen::VectorXd div = Eigen::VectorXd::Zero(n2);
  for (int a = 0; a < n2; ++a) {
    double s = 0.0;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) {
        if (ginv(i, j) == 0.0) continue;
        double term = dB[i](a, j);
        for (int l = 0; l < n1; ++l) term -= gamma1[l](i, j) * B0(a, l);
        for (int b = 0; b < n2; ++b)
          for (int c = 0; c < n2; ++c)
            term += gamma2[a](b, c) * jet.jacobian(b, i) * B0(c, j);
        s += ginv(i, j) * term;
      }
    div[a] = s;
  }
  return div;
}

double div_lambda_commute_check(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& P,
    const MapField& u, int q, const Eigen::VectorXd& x, double h_fd,
    double skew_tol) {
  const MapJet jet0 = u(x);
  const int n1 = jet0.source_dim();
  const int n2 = jet0.target_dim();
  const std::int64_t rows = binomial(n1, q);

  // total skewness: P(v) = v hook beta for a single (q+1)-form beta
  {
    const Eigen::MatrixXd P0 = P(x);
    if (P0.rows() != rows || P0.cols() != n1)
      throw DimensionError("P field has wrong shape");
    const double scale = 1.0 + P0.cwiseAbs().maxCoeff();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(binomial(n1, q + 1));
    Eigen::VectorXd seen = Eigen::VectorXd::Zero(beta.size());
    for_each_subset(n1, q, [&](std::int64_t r, const MultiIndex& I) {
      for (int j = 0; j < n1; ++j) {
        const int sgn = position_sign(j, I);
        if (sgn == 0) {
          if (std::abs(P0(r, j)) > skew_tol * scale)
            throw PreconditionError("P is not totally skew");
          continue;
        }
        MultiIndex merged;
        MultiIndex single{j};
        const int msgn = merge_sign(single, I, &merged);
        const std::int64_t br = colex_rank(merged);
        const double val = P0(r, j) * msgn;
        if (seen[br] == 0.0) {
          beta[br] = val;
          seen[br] = 1.0;
        } else if (std::abs(beta[br] - val) > skew_tol * scale) {
          throw PreconditionError("P is not totally skew");
        }
      }
    });
  }

  const ExtSpace src(n1), tgt(n2);
  auto lam = [&](const Eigen::VectorXd& p) {
    return lambda_k(LinearMap(src, tgt, u(p).jacobian), q);
  };

  // lhs: Div of the pushed-forward section, flat chart
  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(binomial(n2, q));
  for (int j = 0; j < n1; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h_fd;
    xm[j] -= h_fd;
    const Eigen::VectorXd sp = lam(xp) * P(xp).col(j);
    const Eigen::VectorXd sm = lam(xm) * P(xm).col(j);
    lhs += (sp - sm) / (2.0 * h_fd);
  }
  // rhs: push forward the divergence of P
  Eigen::VectorXd divp = Eigen::VectorXd::Zero(rows);
  for (int j = 0; j < n1; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h_fd;
    xm[j] -= h_fd;
    divp += (P(xp).col(j) - P(xm).col(j)) / (2.0 * h_fd);
  }
  const Eigen::VectorXd rhs = lam(x) * divp;
  return (lhs - rhs).norm();
}

std::vector<MapJet> load_jets_jsonl(std::istream& in) {
  using nlohmann::json;
  std::string line;
  if (!std::getline(in, line))
    throw PreconditionError("jet batch: missing header line");
  const json header = json::parse(line);
  const int n1 = header.at("n1").get<int>();
  const int n2 = header.at("n2").get<int>();
  if (n1 < 1 || n2 < 1 || n1 > kMaxDim || n2 > kMaxDim)
    throw DimensionError("jet batch: dimensions out of range");

  std::vector<MapJet> jets;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const json doc = json::parse(line);
    MapJet jet;
    const auto xs = doc.at("x").get<std::vector<double>>();
    const auto us = doc.at("u").get<std::vector<double>>();
    if (static_cast<int>(xs.size()) != n1 || static_cast<int>(us.size()) != n2)
      throw DimensionError("jet batch: point dimension mismatch");
    jet.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n1);
    jet.u = Eigen::Map<const Eigen::VectorXd>(us.data(), n2);
    const auto J = doc.at("J").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(J.size()) != n2)
      throw DimensionError("jet batch: jacobian row count mismatch");
    jet.jacobian.resize(n2, n1);
    for (int a = 0; a < n2; ++a) {
      if (static_cast<int>(J[a].size()) != n1)
        throw DimensionError("jet batch: jacobian column count mismatch");
      for (int i = 0; i < n1; ++i) jet.jacobian(a, i) = J[a][i];
    }
    if (doc.contains("H")) {
      const auto H = doc.at("H")
                         .get<std::vector<std::vector<std::vector<double>>>>();
      if (static_cast<int>(H.size()) != n2)
        throw DimensionError("jet batch: hessian count mismatch");
      std::vector<Eigen::MatrixXd> hess(n2, Eigen::MatrixXd(n1, n1));
      for (int a = 0; a < n2; ++a)
        for (int i = 0; i < n1; ++i) {
          if (static_cast<int>(H[a].size()) != n1 ||
              static_cast<int>(H[a][i].size()) != n1)
            throw DimensionError("jet batch: hessian shape mismatch");
          for (int j = 0; j < n1; ++j) hess[a](i, j) = H[a][i][j];
        }
      jet.hessian = std::move(hess);
    }
    jet.validate();
    jets.push_back(std::move(jet));
  }
  return jets;
}

void save_jets_jsonl(std::ostream& out, const std::vector<MapJet>& jets) {
  using nlohmann::json;
  if (jets.empty()) throw PreconditionError("jet batch: nothing to save");
  const int n1 = jets.front().source_dim();
  const int n2 = jets.front().target_dim();
  out << json{{"n1", n1}, {"n2", n2}}.dump() << "\n";
  for (const auto& jet : jets) {
    json doc;
    doc["x"] = std::vector<double>(jet.x.data(), jet.x.data() + n1);
    doc["u"] = std::vector<double>(jet.u.data(), jet.u.data() + n2);
    std::vector<std::vector<double>> J(n2, std::vector<double>(n1));
    for (int a = 0; a < n2; ++a)
      for (int i = 0; i < n1; ++i) J[a][i] = jet.jacobian(a, i);
    doc["J"] = J;
    if (jet.hessian) {
      std::vector<std::vector<std::vector<double>>> H(
          n2, std::vector<std::vector<double>>(n1, std::vector<double>(n1)));
      for (int a = 0; a < n2; ++a)
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n1; ++j) H[a][i][j] = (*jet.hessian)[a](i, j);
      doc["H"] = H;
    }
    out << doc.dump() << "\n";
  }
}

}  // namespace smith
