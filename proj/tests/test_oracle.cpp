#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "tallip/ledger.hpp"
#include "tallip/oracle.hpp"
#include "tallip/rng.hpp"
#include "test_support.hpp"

using namespace tallip;

TEST_CASE("row_query returns exact rows and counts queries") {
  LpInstance inst;
  inst.n = 2;
  inst.d = 2;
  inst.A = Matrix::Identity(2, 2);
  inst.b = Vector::Zero(2);
  inst.c = Vector::Ones(2);
  CostLedger ledger;

  const RowPair r1 = row_query(inst, 1, ledger, "probe");
  CHECK(r1.a[0] == 1.0);
  CHECK(r1.a[1] == 0.0);
  CHECK(r1.b == 0.0);

  row_query(inst, 1, ledger, "probe");
  CHECK(ledger.classical("probe") == 2);

  CHECK_THROWS_AS(row_query(inst, 3, ledger, "probe"), std::out_of_range);
  CHECK_THROWS_AS(row_query(inst, 0, ledger, "probe"), std::out_of_range);
}

TEST_CASE("ledger counters are exact and monotone") {
  CostLedger ledger;
  ledger.add_classical("a", 3);
  ledger.add_classical("a");
  ledger.add_classical("a/sub", 5);
  CHECK(ledger.classical("a") == 4);
  CHECK(ledger.classical_with_prefix("a") == 9);
  ledger.add_modeled("a", 2.5);
  CHECK(ledger.modeled("a") == doctest::Approx(2.5));
}

TEST_CASE("chain membership: level 0, determinism, nesting") {
  const HalvingChain chain = HalvingChain::make(99, 1 << 16, 4);
  CHECK(chain.depth == 14);
  for (Index i = 0; i < 50; ++i) CHECK(chain_member(chain, i, 0));
  for (Index i = 0; i < 200; ++i) {
    for (int l = 1; l <= chain.depth; ++l) {
      const bool m = chain_member(chain, i, l);
      CHECK(m == chain_member(chain, i, l));  // deterministic
      if (m) CHECK(chain_member(chain, i, l - 1));  // nested
    }
  }
  CHECK_THROWS_AS(chain_member(chain, 0, chain.depth + 1), std::out_of_range);
}

TEST_CASE("chain marginals 2^-l within 3 sigma") {
  const Index n = 100000;
  const HalvingChain chain = HalvingChain::make(1234, n, 1);
  for (int l = 1; l <= 3; ++l) {
    Index count = 0;
    for (Index i = 0; i < n; ++i)
      if (chain_member(chain, i, l)) ++count;
    const double p = std::pow(0.5, l);
    const double sigma = std::sqrt(p * (1 - p) * static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(count) - p * n) < 3.0 * sigma);
    if (l == 1) {  // survivor fraction within 0.5 +- 0.02
      const double frac = static_cast<double>(count) / static_cast<double>(n);
      CHECK(frac > 0.48);
      CHECK(frac < 0.52);
    }
  }
}

TEST_CASE("modeled quantum cost formulas") {
  CHECK(modeled_quantum_cost(CostKind::SpectralApprox, 1e6, 100, 1.0) ==
        doctest::Approx(1e4));
  CHECK(modeled_quantum_cost(CostKind::GradLog, 1e4, 10, 1.0) == doctest::Approx(1e3));
  CHECK(modeled_quantum_cost(CostKind::SpectralApprox, 64, 64, 1.0) ==
        doctest::Approx(64));
  CHECK(modeled_quantum_cost(CostKind::LewisWeights, 1e4, 4, 0.5) ==
        doctest::Approx(std::sqrt(1e4) * 8.0 / 0.25));
  CHECK(modeled_quantum_cost(CostKind::GradLewis, 100, 4, 1.0) ==
        doctest::Approx(10.0 * 32.0));
  CHECK_THROWS_AS(modeled_quantum_cost(CostKind::MatVec, 100, 4, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(modeled_quantum_cost(CostKind::MatVec, 100, 4, 2.0),
                  std::domain_error);
}

TEST_CASE("generated LPs are strictly feasible, deterministic, bounded") {
  const LpInstance a = gen_random_tall_lp(100, 3, 7);
  const LpInstance b = gen_random_tall_lp(100, 3, 7);
  CHECK(a.A == b.A);
  CHECK(a.b == b.b);
  CHECK(a.c == b.c);

  REQUIRE(a.x0.has_value());
  const Vector s = a.A * (*a.x0) - a.b;
  CHECK(s.minCoeff() > 0.0);

  const LpInstance other = gen_random_tall_lp(100, 3, 8);
  CHECK(a.A != other.A);

  // bounded feasible region: max of +-e_j is finite by the reference solve
  for (Index j = 0; j < a.d; ++j) {
    for (double sign : {1.0, -1.0}) {
      LpInstance probe = a;
      probe.c = Vector::Zero(a.d);
      probe.c[j] = sign;  // minimizing sign*e_j bounds the face
      const double v = testsup::vertex_optimum(probe);
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 10.0 + 1e-6);
    }
  }
}

TEST_CASE("generator rejects n < 2d") {
  CHECK_THROWS_AS(gen_random_tall_lp(5, 3, 1), std::invalid_argument);
}

TEST_CASE("search-hard matrix has diagonal gram of popcounts") {
  const Index n = 24, d = 3;
  std::vector<std::vector<std::uint8_t>> z(3, std::vector<std::uint8_t>(8, 0));

  SUBCASE("all zero") {
    const Matrix A = gen_search_hard_matrix(n, d, z);
    CHECK(A.norm() == 0.0);
  }
  SUBCASE("all ones gives (n/d) I") {
    for (auto& zi : z) std::fill(zi.begin(), zi.end(), 1);
    const Matrix A = gen_search_hard_matrix(n, d, z);
    const Matrix G = A.transpose() * A;
    CHECK((G - 8.0 * Matrix::Identity(d, d)).norm() == 0.0);
  }
  SUBCASE("random strings: gram = diag of popcounts, exactly") {
    Rng rng(5);
    Vector pop = Vector::Zero(d);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < 8; ++i) {
        z[static_cast<size_t>(j)][static_cast<size_t>(i)] = rng.bernoulli(0.5);
        pop[j] += z[static_cast<size_t>(j)][static_cast<size_t>(i)];
      }
    const Matrix A = gen_search_hard_matrix(n, d, z);
    const Matrix G = A.transpose() * A;
    CHECK((G - Matrix(pop.asDiagonal())).norm() == 0.0);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(gen_search_hard_matrix(25, 3, z), std::invalid_argument);
  }
}

TEST_CASE("instance validation") {
  LpInstance inst;
  inst.n = 2;
  inst.d = 1;
  inst.A = Matrix(2, 1);
  inst.A << 1.0, -1.0;
  inst.b = Vector(2);
  inst.b << 0.0, -1.0;
  inst.c = Vector::Ones(1);
  inst.validate();  // no x0: fine

  inst.x0 = Vector::Zero(1);  // on the boundary
  CHECK_THROWS_AS(inst.validate(), InfeasibleInterior);

  inst.x0 = Vector::Constant(1, 0.5);
  inst.validate();

  inst.b[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}
