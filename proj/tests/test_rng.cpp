#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tallip/rng.hpp"

using tallip::Rng;

TEST_CASE("substreams are deterministic and label-independent") {
  Rng a(42);
  Rng b(42);
  CHECK(a.stream("x").bits() == b.stream("x").bits());
  CHECK(a.stream("x").bits() != a.stream("y").bits());
  CHECK(a.stream("x", 0).bits() != a.stream("x", 1).bits());

  // reordering draws in one stream must not perturb a sibling
  Rng s1 = a.stream("sub");
  (void)a.stream("other").normal();
  Rng s2 = b.stream("sub");
  for (int i = 0; i < 16; ++i) CHECK(s1.bits() == s2.bits());
}

TEST_CASE("uniform01 lies in [0,1) with the right mean") {
  Rng r(7);
  double sum = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / N - 0.5) < 0.005);
}

TEST_CASE("normal moments") {
  Rng r(3);
  double s1 = 0, s2 = 0, s4 = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / N) < 0.01);
  CHECK(std::abs(s2 / N - 1.0) < 0.02);
  CHECK(std::abs(s4 / N - 3.0) < 0.1);
}

namespace {
void check_binomial_moments(long long t, double p, int reps, std::uint64_t seed) {
  Rng r(seed);
  const double tp = static_cast<double>(t);
  double mean = 0, var = 0;
  std::vector<double> xs(static_cast<size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const long long k = r.binomial(t, p);
    REQUIRE(k >= 0);
    REQUIRE(k <= t);
    xs[static_cast<size_t>(i)] = static_cast<double>(k);
    mean += xs[static_cast<size_t>(i)];
  }
  mean /= reps;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= reps - 1;
  const double mu = tp * p;
  const double sig2 = tp * p * (1 - p);
  // 5-sigma tolerance on the sample mean, generous band on the variance
  CHECK(std::abs(mean - mu) < 5.0 * std::sqrt(sig2 / reps) + 1e-9);
  CHECK(var > 0.85 * sig2);
  CHECK(var < 1.15 * sig2);
}
}  // namespace

TEST_CASE("binomial sampler matches moments across regimes") {
  check_binomial_moments(5, 0.3, 40000, 11);        // inversion
  check_binomial_moments(100, 0.04, 40000, 12);     // inversion, small np
  check_binomial_moments(1000, 0.25, 40000, 13);    // BTRD
  check_binomial_moments(1000000, 0.001, 20000, 14);  // BTRD large t
  check_binomial_moments(50, 0.9, 40000, 15);       // symmetry branch
}

TEST_CASE("binomial edge cases") {
  Rng r(5);
  CHECK(r.binomial(0, 0.5) == 0);
  CHECK(r.binomial(10, 0.0) == 0);
  CHECK(r.binomial(10, 1.0) == 10);
  CHECK_THROWS(r.binomial(-1, 0.5));
  CHECK_THROWS(r.binomial(10, 1.5));
}

TEST_CASE("binomial chain partitions the total") {
  // occupancy sampling used by the mean estimator: counts must sum exactly
  Rng r(9);
  const long long total = 123457;
  const int cells = 97;
  long long left = total, sum = 0;
  for (int i = 0; i < cells; ++i) {
    const long long c = (i + 1 == cells)
                            ? left
                            : r.binomial(left, 1.0 / static_cast<double>(cells - i));
    sum += c;
    left -= c;
  }
  CHECK(sum == total);
  CHECK(left == 0);
}
