#include "smith/exterior.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace smith;

TEST_CASE("multi-index colex ranking round-trips") {
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= n; ++k)
      for_each_subset(n, k, [&](std::int64_t r, const MultiIndex& I) {
        CHECK(colex_rank(I) == r);
        CHECK(colex_unrank(r, n, k) == I);
      });
}

TEST_CASE("basis wedge: e1 ^ e2 = e12 on R3") {
  ExtSpace r3(3);
  KForm e1 = basis_form(r3, {0});
  KForm e2 = basis_form(r3, {1});
  KForm w = wedge(e1, e2);
  CHECK(w.coeff({0, 1}) == doctest::Approx(1.0));
  CHECK(w.coeff({0, 2}) == doctest::Approx(0.0));
  CHECK(w.coeff({1, 2}) == doctest::Approx(0.0));
}

TEST_CASE("odd-degree self-wedge vanishes") {
  ExtSpace r5(5);
  std::mt19937_64 rng(7);
  KForm a = oracle::random_form(r5, 1, rng);
  CHECK(wedge(a, a).coeffs().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  KForm b = oracle::random_form(r5, 3, rng);
  // degree 3+3 > 5 overflows
  CHECK_THROWS_AS(wedge(b, b), DegreeError);
}

TEST_CASE("omega ^ omega = 2 e1234 on R4") {
  // derived by brute-force expansion over the two index pairs
  ExtSpace r4(4);
  KForm omega = make_form(r4, 2);
  omega.set_coeff({0, 1}, 1.0);
  omega.set_coeff({2, 3}, 1.0);
  KForm sq = wedge(omega, omega);
  CHECK(sq.coeff({0, 1, 2, 3}) == doctest::Approx(2.0));
}

TEST_CASE("wedge graded commutativity and bilinearity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    ExtSpace r6(6);
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; q + p <= 6 && q <= 3; ++q) {
        KForm a = oracle::random_form(r6, p, rng);
        KForm b = oracle::random_form(r6, q, rng);
        KForm ab = wedge(a, b);
        KForm ba = wedge(b, a);
        const double sign = (p * q) % 2 == 0 ? 1.0 : -1.0;
        CHECK((ab.coeffs() - sign * ba.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
}

TEST_CASE("wedge mismatched spaces rejected") {
  ExtSpace r3(3), r4(4);
  CHECK_THROWS_AS(wedge(basis_form(r3, {0}), basis_form(r4, {1})),
                  DimensionError);
}

TEST_CASE("form evaluation matches permutation-expansion oracle") {
  std::mt19937_64 rng(13);
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      ExtSpace sp(n);
      KForm a = oracle::random_form(sp, k, rng);
      Eigen::MatrixXd v = oracle::random_matrix(n, k, rng);
      CHECK(a.evaluate(v) == doctest::Approx(oracle::eval_form(a, v)).epsilon(1e-10));
    }
}

TEST_CASE("alternation: evaluation with a repeated vector is zero") {
  std::mt19937_64 rng(17);
  ExtSpace sp(5);
  KForm a = oracle::random_form(sp, 3, rng);
  Eigen::MatrixXd v = oracle::random_matrix(5, 3, rng);
  v.col(2) = v.col(0);
  CHECK(std::abs(a.evaluate(v)) <= 1e-12);
}

TEST_CASE("hodge star basics on euclidean R3") {
  ExtSpace r3(3);
  KForm one = make_form(r3, 0);
  one.coeffs()[0] = 1.0;
  KForm vol = hodge_star(one);
  CHECK(vol.coeff({0, 1, 2}) == doctest::Approx(1.0));
  KForm se1 = hodge_star(basis_form(r3, {0}));
  CHECK(se1.coeff({1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("double star sign and isometry, random forms, general metrics") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);  // up to 8
    const bool curved = trial % 3 == 0;
    ExtSpace sp = curved ? ExtSpace(n, oracle::random_spd(n, rng)) : ExtSpace(n);
    const int k = static_cast<int>(rng() % (n + 1));
    KForm a = oracle::random_form(sp, k, rng);
    KForm ss = hodge_star(hodge_star(a));
    const double sign = (k * (n - k)) % 2 == 0 ? 1.0 : -1.0;
    CHECK((ss.coeffs() - sign * a.coeffs()).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + a.coeffs().cwiseAbs().maxCoeff()));
    CHECK(hodge_star(a).norm() ==
          doctest::Approx(a.norm()).epsilon(1e-10));
  }
}

TEST_CASE("defining identity a ^ star(b) = <a,b> vol") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    ExtSpace sp = trial % 2 ? ExtSpace(n, oracle::random_spd(n, rng)) : ExtSpace(n);
    const int k = static_cast<int>(rng() % (n + 1));
    KForm a = oracle::random_form(sp, k, rng);
    KForm b = oracle::random_form(sp, k, rng);
    KForm lhs = wedge(a, hodge_star(b));
    KForm rhs = a.inner(b) * volume_form(sp);
    CHECK((lhs.coeffs() - rhs.coeffs()).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + a.norm() * b.norm()));
  }
}

TEST_CASE("star commutes with raising the index") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    ExtSpace sp(n, oracle::random_spd(n, rng));
    const int k = static_cast<int>(rng() % (n + 1));
    KForm a = oracle::random_form(sp, k, rng);
    KVector lhs = raise(hodge_star(a));
    KVector rhs = hodge_star(raise(a));
    CHECK((lhs.coeffs() - rhs.coeffs()).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + a.coeffs().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("interior product: basis contraction and nilpotence") {
  ExtSpace r3(3);
  KForm e12 = basis_form(r3, {0, 1});
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  KForm hooked = interior(e1, e12);
  CHECK(hooked.coeff({1}) == doctest::Approx(1.0));
  CHECK(hooked.coeff({0}) == doctest::Approx(0.0));
  CHECK(hooked.coeff({2}) == doctest::Approx(0.0));

  std::mt19937_64 rng(31);
  ExtSpace r6(6);
  KForm a = oracle::random_form(r6, 4, rng);
  Eigen::VectorXd v = oracle::random_matrix(6, 1, rng).col(0);
  KForm vva = interior(v, interior(v, a));
  CHECK(vva.coeffs().cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.norm()));

  KForm scalar = make_form(r3, 0);
  CHECK_THROWS_AS(interior(e1, scalar), DegreeError);
}

TEST_CASE("adjunction <v hook a, b> = <a, v-flat ^ b>") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    ExtSpace sp = trial % 2 ? ExtSpace(n, oracle::random_spd(n, rng)) : ExtSpace(n);
    const int k = 1 + static_cast<int>(rng() % n);
    KForm a = oracle::random_form(sp, k, rng);
    KForm b = oracle::random_form(sp, k - 1, rng);
    Eigen::VectorXd v = oracle::random_matrix(n, 1, rng).col(0);
    // v-flat as a 1-form: g v
    KForm vflat(sp, 1, Variance::Form, Eigen::VectorXd(sp.metric() * v));
    const double lhs = interior(v, a).inner(b);
    const double rhs = a.inner(wedge(vflat, b));
    CHECK(std::abs(lhs - rhs) <=
          1e-10 * (1.0 + a.norm() * b.norm() * v.norm()));
  }
}

TEST_CASE("lambda_k identity and determinant cases") {
  ExtSpace r2(2), r3(3);
  LinearMap id(r2, r2, Eigen::MatrixXd::Identity(2, 2));
  CHECK(lambda_k(id, 2)(0, 0) == doctest::Approx(1.0));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  LinearMap diag(r2, r2, d);
  CHECK(lambda_k(diag, 2)(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("lambda_k minors match cofactor oracle") {
  std::mt19937_64 rng(41);
  ExtSpace r2(2), r3(3);
  Eigen::MatrixXd m = oracle::random_matrix(3, 2, rng);
  LinearMap A(r2, r3, m);
  Eigen::MatrixXd l2 = lambda_k(A, 2);
  REQUIRE(l2.rows() == 3);
  REQUIRE(l2.cols() == 1);
  for_each_subset(3, 2, [&](std::int64_t r, const MultiIndex& J) {
    Eigen::MatrixXd sub(2, 2);
    sub.row(0) = m.row(J[0]);
    sub.row(1) = m.row(J[1]);
    CHECK(l2(r, 0) == doctest::Approx(oracle::cofactor_det(sub)).epsilon(1e-12));
  });
}

TEST_CASE("lambda_k functoriality on random composable pairs") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int n1 = 2 + static_cast<int>(rng() % 3);
    const int n2 = 2 + static_cast<int>(rng() % 4);
    const int n3 = 2 + static_cast<int>(rng() % 4);
    ExtSpace s1(n1), s2(n2), s3(n3);
    LinearMap B(s1, s2, oracle::random_matrix(n2, n1, rng));
    LinearMap A(s2, s3, oracle::random_matrix(n3, n2, rng));
    LinearMap AB(s1, s3, Eigen::MatrixXd(A.matrix * B.matrix));
    for (int k = 1; k <= std::min({n1, n2, n3}); ++k) {
      Eigen::MatrixXd lhs = lambda_k(AB, k);
      Eigen::MatrixXd rhs = lambda_k(A, k) * lambda_k(B, k);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("hadamard: isometry, conformal, and strict cases") {
  ExtSpace r2(2), r4(4);
  LinearMap id(r2, r2, Eigen::MatrixXd::Identity(2, 2));
  auto res = hadamard_check(id);
  CHECK(res.lhs == doctest::Approx(1.0));
  CHECK(res.rhs == doctest::Approx(1.0));
  CHECK(res.conformal_defect == doctest::Approx(0.0));

  // c times orthonormal columns: equality for any c > 0
  std::mt19937_64 rng(47);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(
                          oracle::random_matrix(4, 2, rng))
                          .householderQ() *
                      Eigen::MatrixXd::Identity(4, 2);
  LinearMap conf(r2, r4, Eigen::MatrixXd(2.5 * q));
  res = hadamard_check(conf);
  CHECK(res.lhs == doctest::Approx(res.rhs).epsilon(1e-12));
  CHECK(res.conformal_defect <= 1e-10);

  // diag(1,2): lhs = 2, rhs = 5/2
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  res = hadamard_check(LinearMap(r2, r2, d));
  CHECK(res.lhs == doctest::Approx(2.0));
  CHECK(res.rhs == doctest::Approx(2.5));

  // n1 > n2: rank-deficient, lhs reported as zero
  res = hadamard_check(LinearMap(r4, r2, oracle::random_matrix(2, 4, rng)));
  CHECK(res.rank_deficient);
  CHECK(res.lhs == 0.0);
}

TEST_CASE("hadamard bound holds for random matrices incl. curved metrics") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const int n = k + static_cast<int>(rng() % (8 - k + 1));
    const bool curved = trial % 4 == 0;
    ExtSpace src = curved ? ExtSpace(k, oracle::random_spd(k, rng)) : ExtSpace(k);
    ExtSpace tgt = curved ? ExtSpace(n, oracle::random_spd(n, rng)) : ExtSpace(n);
    auto res = hadamard_check(LinearMap(src, tgt, oracle::random_matrix(n, k, rng)));
    CHECK(res.lhs <= res.rhs + 1e-12 * (1.0 + res.rhs));
  }
}

TEST_CASE("space invariant violations are rejected") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.2, 1.0;  // asymmetric
  CHECK_THROWS(ExtSpace(2, bad));
  Eigen::MatrixXd neg(2, 2);
  neg << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS(ExtSpace(2, neg));
  CHECK_THROWS(ExtSpace(2, Eigen::MatrixXd::Identity(2, 2), 3));
  CHECK_THROWS(ExtSpace(17));
}
