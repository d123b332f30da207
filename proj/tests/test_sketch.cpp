#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "tallip/sketch.hpp"
#include "test_support.hpp"

using namespace tallip;
using testsup::random_matrix;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("exact leverage scores: identity, duplicated row, brute force") {
  CHECK((leverage_scores_exact(Matrix::Identity(4, 4)) - Vector::Ones(4)).norm() == 0.0);

  Matrix two_ones(2, 1);
  two_ones << 1.0, 1.0;
  const Vector s = leverage_scores_exact(two_ones);
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));  // rank 1

  const Matrix A = random_matrix(6, 2, 17);
  const Vector mine = leverage_scores_exact(A);
  const Vector ref = testsup::leverage_brute_force(A);
  CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("leverage scores sum to rank and stay in [0,1]") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Matrix A = random_matrix(40, 5, seed);
    const Vector s = leverage_scores_exact(A);
    CHECK(s.minCoeff() >= -1e-12);
    CHECK(s.maxCoeff() <= 1.0 + 1e-12);
    CHECK(std::abs(s.sum() - 5.0) < 1e-8);
  }
  // rank-deficient: duplicate a column
  Matrix A = random_matrix(30, 3, 4);
  A.col(2) = A.col(1);
  CHECK(std::abs(leverage_scores_exact(A).sum() - 2.0) < 1e-8);
}

TEST_CASE("direct generalized scores: B = A agreement, kernel detection, monotone") {
  const Matrix A = random_matrix(50, 4, 21);
  const LeverageEstimator est = LeverageEstimator::direct(A);
  const Vector exact = leverage_scores_exact(A);
  for (Index i = 0; i < A.rows(); ++i)
    CHECK(est.query(A.row(i).transpose()) == doctest::Approx(exact[i]).epsilon(1e-10));

  SUBCASE("row in the kernel maps to infinity") {
    Matrix B = random_matrix(20, 3, 22);
    B.col(1).setZero();
    const LeverageEstimator be = LeverageEstimator::direct(B);
    Vector e2 = Vector::Zero(3);
    e2[1] = 1.0;
    CHECK(be.query(e2) == kInf);
    CHECK(be.query(Vector::Zero(3)) == 0.0);
  }

  SUBCASE("uniform subsample overestimates: sigma^B_i(A) >= sigma_i(A)") {
    Rng rng(31);
    const Matrix M = random_matrix(200, 4, 23);
    std::vector<Index> keep;
    for (Index i = 0; i < M.rows(); ++i)
      if (rng.bernoulli(0.5)) keep.push_back(i);
    Matrix B(static_cast<Index>(keep.size()), 4);
    for (Index k = 0; k < B.rows(); ++k) B.row(k) = M.row(keep[static_cast<size_t>(k)]);
    const LeverageEstimator be = LeverageEstimator::direct(B);
    const Vector sig = leverage_scores_exact(M);
    for (Index i = 0; i < M.rows(); ++i) {
      const double g = be.query(M.row(i).transpose());
      CHECK(g >= sig[i] - 1e-10);
    }
  }
}

TEST_CASE("JL estimator: identity rows, vanishing kernel sketch, distortion") {
  Rng rng(77);
  SUBCASE("B = I_d gives unit scores within eps") {
    const Matrix B = Matrix::Identity(8, 8);
    const LeverageEstimator est = LeverageEstimator::jl(B, 0.25, 1000, rng.stream("a"));
    for (Index i = 0; i < 8; ++i) {
      const double v = est.query(B.row(i).transpose());
      CHECK(v > 0.75);
      CHECK(v < 1.25);
    }
  }
  SUBCASE("nonsingular gram: kernel responses vanish") {
    const Matrix B = random_matrix(40, 3, 5);
    const LeverageEstimator est = LeverageEstimator::jl(B, 0.5, 100, rng.stream("b"));
    const Matrix probes = random_matrix(20, 3, 51);
    for (Index i = 0; i < probes.rows(); ++i) {
      const Vector a = probes.row(i).transpose();
      CHECK((est.C_prime() * a).norm() <= 1e-10 * a.norm());
    }
  }
  SUBCASE("singular gram: kernel rows detected") {
    Matrix B = random_matrix(40, 3, 6);
    B.col(2).setZero();
    const LeverageEstimator est = LeverageEstimator::jl(B, 0.5, 100, rng.stream("c"));
    Vector e3 = Vector::Zero(3);
    e3[2] = 1.0;
    CHECK(est.query(e3) == kInf);
  }
  SUBCASE("distortion within (1 +- eps) against the direct oracle") {
    const double eps = 0.2;
    const Matrix B = random_matrix(300, 5, 7);
    const LeverageEstimator jl = LeverageEstimator::jl(B, eps, 300, rng.stream("d"));
    const LeverageEstimator direct = LeverageEstimator::direct(B);
    const Matrix probes = random_matrix(200, 5, 8);
    for (Index i = 0; i < probes.rows(); ++i) {
      const Vector a = probes.row(i).transpose();
      const double t = jl.query(a);
      const double e = direct.query(a);
      CHECK(t >= (1 - eps) * e - 1e-12);
      CHECK(t <= (1 + eps) * e + 1e-12);
    }
  }
  SUBCASE("sketch dimension is ceil(beta ln(n)/eps^2)") {
    const Matrix B = random_matrix(20, 2, 9);
    const LeverageEstimator est = LeverageEstimator::jl(B, 0.5, 1024, rng.stream("e"));
    CHECK(est.sketch_dim() ==
          static_cast<Index>(std::ceil(12.0 * std::log(1024.0) / 0.25)));
  }
  SUBCASE("zero row maps to zero") {
    const Matrix B = random_matrix(40, 3, 10);
    const LeverageEstimator est = LeverageEstimator::jl(B, 0.5, 100, rng.stream("f"));
    CHECK(est.query(Vector::Zero(3)) == 0.0);
  }
}

TEST_CASE("weighted subsample: infinite and zero weights") {
  const Matrix A = random_matrix(30, 3, 41);
  Rng rng(1);
  WeightVector w;
  w.values = Vector::Constant(30, kInf);
  SpectralSketch sk = weighted_subsample(RowOracle::dense(A), w, 0.5, rng);
  CHECK(sk.row_count() == 30);
  CHECK((sk.rows - A).norm() == 0.0);  // scale 1 everywhere
  CHECK(sk.scales.maxCoeff() == 1.0);

  w.values = Vector::Zero(30);
  sk = weighted_subsample(RowOracle::dense(A), w, 0.5, rng);
  CHECK(sk.row_count() == 0);

  w.values[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(weighted_subsample(RowOracle::dense(A), w, 0.5, rng),
                  std::domain_error);
}

TEST_CASE("weighted subsample with exact scores achieves the sandwich") {
  const double eps = 0.5;
  int ok = 0;
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix A = random_matrix(2000, 10, 1000 + static_cast<std::uint64_t>(trial));
    WeightVector w;
    w.values = leverage_scores_exact(A);
    SpectralSketch sk = weighted_subsample(RowOracle::dense(A), w, eps, rng);
    const Vector ev = testsup::whitened_spectrum(A.transpose() * A, sk.gram());
    if (ev.allFinite() && ev.minCoeff() >= 1 - eps && ev.maxCoeff() <= 1 + eps) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("subsample unbiasedness: mean gram near A'A") {
  const Matrix A = random_matrix(300, 4, 55);
  WeightVector w;
  w.values = leverage_scores_exact(A);
  Matrix mean = Matrix::Zero(4, 4);
  Rng rng(7);
  const int reps = 500;
  for (int r = 0; r < reps; ++r)
    mean += weighted_subsample(RowOracle::dense(A), w, 1.0, rng).gram();
  mean /= reps;
  const Matrix G = A.transpose() * A;
  CHECK((mean - G).norm() / G.norm() < 0.05);
}

TEST_CASE("repeated halving: shortcut, accuracy, row budget") {
  CostLedger ledger;
  SUBCASE("small n returns the matrix itself") {
    const Matrix A = random_matrix(64, 8, 3);
    SpectralSketch sk = repeated_halving(RowOracle::dense(A), 0.25, Rng(5), ledger, "sk");
    CHECK(sk.row_count() == 64);
    CHECK((sk.rows - A).norm() == 0.0);
    CHECK(ledger.classical("sk") == 64);
    CHECK(ledger.modeled("sk") ==
          doctest::Approx(modeled_quantum_cost(CostKind::SpectralApprox, 64, 8, 0.25)));
  }
  SUBCASE("acceptance shape: 25 quick trials") {
    const double eps = 0.25;
    int ok = 0;
    Index max_rows = 0;
    for (int t = 0; t < 25; ++t) {
      const Matrix A = random_matrix(4096, 8, 400 + static_cast<std::uint64_t>(t));
      SpectralSketch sk = repeated_halving(RowOracle::dense(A), eps,
                                           Rng(9000 + static_cast<std::uint64_t>(t)),
                                           ledger, "sk");
      max_rows = std::max(max_rows, sk.row_count());
      const Vector ev = testsup::whitened_spectrum(A.transpose() * A, sk.gram());
      if (ev.allFinite() && ev.minCoeff() >= 1 - eps && ev.maxCoeff() <= 1 + eps) ++ok;
    }
    CHECK(ok >= 23);
    CHECK(max_rows <= static_cast<Index>(40.0 * 8 * std::log(8.0) / (eps * eps)));
  }
  SUBCASE("JL score mode also lands the sandwich") {
    const double eps = 0.3;
    int ok = 0;
    HalvingOptions opts;
    opts.score_mode = LeverageEstimator::Mode::JL;
    for (int t = 0; t < 10; ++t) {
      const Matrix A = random_matrix(2048, 6, 500 + static_cast<std::uint64_t>(t));
      SpectralSketch sk = repeated_halving(RowOracle::dense(A), eps,
                                           Rng(700 + static_cast<std::uint64_t>(t)),
                                           ledger, "sk", opts);
      const Vector ev = testsup::whitened_spectrum(A.transpose() * A, sk.gram());
      if (ev.allFinite() && ev.minCoeff() >= 1 - eps && ev.maxCoeff() <= 1 + eps) ++ok;
    }
    CHECK(ok >= 8);
  }
  SUBCASE("provenance: stored rows equal scale times source row") {
    const Matrix A = random_matrix(4096, 4, 777);
    SpectralSketch sk = repeated_halving(RowOracle::dense(A), 0.5, Rng(13), ledger, "sk");
    REQUIRE(sk.row_count() > 0);
    for (Index k = 0; k < sk.row_count(); ++k) {
      const Index src = sk.source_indices[static_cast<size_t>(k)];
      CHECK((sk.rows.row(k) - sk.scales[k] * A.row(src)).norm() < 1e-12);
    }
  }
}

TEST_CASE("halving classical row queries grow linearly in n") {
  std::vector<double> counts;
  for (Index n : {4096, 8192, 16384}) {
    CostLedger ledger;
    const Matrix A = random_matrix(n, 4, static_cast<std::uint64_t>(n));
    repeated_halving(RowOracle::dense(A), 0.5, Rng(3), ledger, "sk");
    counts.push_back(static_cast<double>(ledger.classical("sk")));
  }
  const double slope = std::log(counts[2] / counts[0]) / std::log(4.0);
  CHECK(slope > 0.9);
  CHECK(slope < 1.1);
}

TEST_CASE("sketch JSON carries provenance fields") {
  const Matrix A = random_matrix(64, 4, 2);
  CostLedger ledger;
  SpectralSketch sk = repeated_halving(RowOracle::dense(A), 0.5, Rng(1), ledger, "sk");
  const auto j = sk.to_json();
  CHECK(j.at("epsilon").get<double>() == 0.5);
  CHECK(j.at("source_indices").size() == static_cast<size_t>(sk.row_count()));
  CHECK(j.at("scales").size() == static_cast<size_t>(sk.row_count()));
}
