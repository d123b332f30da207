#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tallip/matvec.hpp"
#include "test_support.hpp"

using namespace tallip;
using testsup::random_matrix;

namespace {

MatVecRequest make_request(const Matrix& B, const Vector& v, double delta,
                           double failure_prob = 0.01) {
  MatVecRequest req;
  req.B = RowOracle::dense(B);
  req.v = [&v](Index i) { return v[i]; };
  req.v_inf_bound = std::max(1e-12, v.cwiseAbs().maxCoeff());
  req.delta = delta;
  req.failure_prob = failure_prob;
  return req;
}

double inv_gram_norm(const Matrix& B, const Vector& r) {
  const PsdPinv p = pinv_psd(B.transpose() * B);
  return std::sqrt(std::max(0.0, r.dot(p.pinv * r)));
}

}  // namespace

TEST_CASE("exact matvec oracle") {
  const Matrix B = random_matrix(40, 3, 1);
  Vector e1 = Vector::Zero(40);
  e1[0] = 1.0;
  CHECK((exact_matvec(B, e1) - B.row(0).transpose()).norm() == 0.0);
  CHECK(exact_matvec(Matrix::Zero(10, 2), Vector::Ones(10)).norm() == 0.0);

  const Vector v = random_matrix(40, 1, 2);
  const Vector direct = B.transpose() * v;  // independent summation order
  CHECK((exact_matvec(B, v) - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero vector estimates to exactly zero") {
  const Matrix B = random_matrix(128, 3, 3);
  CostLedger ledger;
  Vector v = Vector::Zero(128);
  MatVecRequest req = make_request(B, v, 0.3);
  const Vector y = estimate_matvec(req, Rng(1), ledger, "mv");
  CHECK(y.norm() == 0.0);
}

TEST_CASE("identity B: two-norm error within delta") {
  const Index d = 6;
  const Matrix B = Matrix::Identity(d, d);
  const Vector v = random_matrix(d, 1, 4);
  CostLedger ledger;
  MatVecRequest req = make_request(B, v, 0.1);
  const Vector y = estimate_matvec(req, Rng(2), ledger, "mv");
  CHECK((y - v).norm() <= 0.1);
}

TEST_CASE("acceptance shape: error beats delta in most trials") {
  const double delta = 0.2;
  int ok = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    const Matrix B = random_matrix(2048, 4, 100 + static_cast<std::uint64_t>(t));
    const Vector v = Vector::Ones(2048);
    CostLedger ledger;
    MatVecRequest req = make_request(B, v, delta);
    const Vector y = estimate_matvec(req, Rng(50 + static_cast<std::uint64_t>(t)),
                                     ledger, "mv");
    const Vector err = y - B.transpose() * v;
    if (inv_gram_norm(B, err) <= delta) ++ok;
  }
  CHECK(ok >= trials - 2);  // >= 90 percent
}

TEST_CASE("sample accounting matches the group formula") {
  const Matrix B = random_matrix(512, 3, 7);
  const Vector v = Vector::Ones(512);
  CostLedger ledger;
  MatVecRequest req = make_request(B, v, 0.5, 0.01);
  MatVecStats stats;
  estimate_matvec(req, Rng(3), ledger, "mv", &stats);
  const Index G = static_cast<Index>(std::ceil(8.0 * std::log(100.0)));
  CHECK(stats.groups == G);
  const double tr_bound = 1.5 * 512 * 3;
  CHECK(stats.group_size ==
        static_cast<std::uint64_t>(std::ceil(16.0 * tr_bound / 0.25 / G)));
  CHECK(ledger.classical("mv") == stats.samples);
  CHECK(ledger.modeled("mv") ==
        doctest::Approx(modeled_quantum_cost(CostKind::MatVec, 512, 3, 0.5)));
}

TEST_CASE("declared bound violations are reported with the index") {
  const Matrix B = random_matrix(64, 2, 8);
  Vector v = Vector::Ones(64);
  v[17] = 3.0;
  CostLedger ledger;
  MatVecRequest req = make_request(B, v, 0.5);
  req.v_inf_bound = 1.0;  // deliberately too small
  try {
    estimate_matvec(req, Rng(4), ledger, "mv");
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("rank deficient B is rejected") {
  Matrix B = random_matrix(64, 3, 9);
  B.col(1) = B.col(0);
  const Vector v = Vector::Ones(64);
  CostLedger ledger;
  MatVecRequest req = make_request(B, v, 0.5);
  CHECK_THROWS_AS(estimate_matvec(req, Rng(5), ledger, "mv"), RankDeficient);
}

TEST_CASE("preconditioned sample: mean and second-moment bounds") {
  const Index n = 512, d = 3;
  const Matrix B = random_matrix(n, d, 10);
  const Vector v = Vector::Ones(n);
  // build the preconditioner the same way the estimator does
  CostLedger ledger;
  SpectralSketch sk = repeated_halving(RowOracle::dense(B), 0.5,
                                       Rng(6).stream("precondition"), ledger, "w");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sk.gram());
  const Matrix Wm = eig.eigenvectors() *
                    eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    eig.eigenvectors().transpose();

  const Index samples = 200000;
  Rng rng(11);
  Vector mean = Vector::Zero(d);
  Vector second = Vector::Zero(d);
  for (Index s = 0; s < samples; ++s) {
    const Index l = static_cast<Index>(rng.bits() % static_cast<std::uint64_t>(n));
    const Vector x = static_cast<double>(n) * v[l] * (Wm * B.row(l).transpose());
    mean += x;
    second += x.cwiseProduct(x);
  }
  mean /= static_cast<double>(samples);
  second /= static_cast<double>(samples);

  const Vector true_mean = Wm * (B.transpose() * v);
  for (Index j = 0; j < d; ++j) {
    // empirical mean within 3 sigma per coordinate
    const double sigma = std::sqrt(second[j] / static_cast<double>(samples));
    CHECK(std::abs(mean[j] - true_mean[j]) <= 3.0 * sigma + 1e-9);
    // covariance bound sigma_i^2 <= (3/2) n ||v||_inf^2
    CHECK(second[j] <= 1.5 * static_cast<double>(n) + 3.0 * sigma * sigma);
  }
}

TEST_CASE("norm transfer: quadratic forms of W~ and B'B sandwich within 3/2") {
  const Matrix B = random_matrix(1024, 4, 12);
  CostLedger ledger;
  SpectralSketch sk = repeated_halving(RowOracle::dense(B), 0.5,
                                       Rng(8).stream("precondition"), ledger, "w");
  const Matrix W = B.transpose() * B;
  const Matrix Wt = sk.gram();
  for (int k = 0; k < 100; ++k) {
    const Vector u = random_matrix(4, 1, 500 + static_cast<std::uint64_t>(k));
    const double qw = u.dot(W * u);
    const double qt = u.dot(Wt * u);
    CHECK(qw <= 1.5 * qt);
    CHECK(qt <= 2.0 * qw);
  }
}

TEST_CASE("perturbation bound holds densely") {
  const Matrix B = random_matrix(256, 4, 13);
  const Vector v = random_matrix(256, 1, 14);
  SUBCASE("D = I gives zero lhs") {
    const auto [lhs, rhs] = perturbation_bound_check(B, v, Vector::Ones(256));
    CHECK(lhs <= 1e-12);
    CHECK(rhs == 0.0);
  }
  SUBCASE("random D at eps = 0.1") {
    Rng rng(15);
    Vector diag(256);
    for (Index i = 0; i < 256; ++i) diag[i] = 1.0 + 0.1 * (2.0 * rng.uniform01() - 1.0);
    const auto [lhs, rhs] = perturbation_bound_check(B, v, diag);
    CHECK(lhs <= rhs + 1e-12);
  }
}
