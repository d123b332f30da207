#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tallip {

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

/// Deterministic random stream. All distributions are implemented on top of
/// mt19937_64 (whose output sequence is pinned by the standard), so results
/// are reproducible across platforms and standard libraries.
///
/// Substreams are derived from the stream's own seed and a label, not from
/// generator state: reordering draws in one subsystem never perturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Named child stream (independent of this stream's draw position).
  Rng stream(std::string_view label) const;
  Rng stream(std::string_view label, std::uint64_t k) const;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits();
  double uniform01();  // [0, 1)
  double normal();     // standard normal, polar method
  bool bernoulli(double p);
  /// Exact binomial(t, p) sample. Inversion for small t*p, BTRD otherwise.
  long long binomial(long long t, double p);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;

  long long binomial_inversion(long long t, double p);
  long long binomial_btrd(long long t, double p);
};

}  // namespace tallip
