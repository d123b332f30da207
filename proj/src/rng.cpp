#include "tallip/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tallip {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) noexcept {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

Rng Rng::stream(std::string_view label) const {
  return Rng(splitmix64(seed_ ^ hash_label(label)));
}

Rng Rng::stream(std::string_view label, std::uint64_t k) const {
  return Rng(splitmix64(seed_ ^ hash_label(label) ^ splitmix64(k + 1)));
}

std::uint64_t Rng::bits() { return gen_(); }

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * m;
  has_cached_ = true;
  return u * m;
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

long long Rng::binomial(long long t, double p) {
  if (t < 0 || p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw std::domain_error("binomial: invalid parameters");
  if (t == 0 || p == 0.0) return 0;
  if (p == 1.0) return t;
  if (p > 0.5) return t - binomial(t, 1.0 - p);
  const double np = static_cast<double>(t) * p;
  if (np < 10.0 || t < 32) return binomial_inversion(t, p);
  return binomial_btrd(t, p);
}

long long Rng::binomial_inversion(long long t, double p) {
  // CDF inversion by sequential search from 0; expected O(t*p) steps.
  const double q = 1.0 - p;
  const double s = p / q;
  double f = std::pow(q, static_cast<double>(t));
  if (f <= 0.0) {
    // extremely unlikely underflow guard for the small-np branch
    long long k = 0;
    for (long long i = 0; i < t; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }
  for (;;) {
    double u = uniform01();
    double fk = f;
    for (long long k = 0; k <= t; ++k) {
      if (u < fk) return k;
      u -= fk;
      fk *= s * static_cast<double>(t - k) / static_cast<double>(k + 1);
    }
    // numerical leftover mass; redraw
  }
}

namespace {
// Stirling series correction term used by BTRD.
double fc(long long k) {
  static const double tab[10] = {
      0.08106146679532726, 0.04134069595540929, 0.02767792568499834,
      0.02079067210376509, 0.01664469118982119, 0.01387612882307075,
      0.01189670994589177, 0.01041126526197209, 0.009255462182712733,
      0.008330563433362871};
  if (k < 10) return tab[k];
  const double kk = static_cast<double>(k) + 1.0;
  return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * kk * kk)) / (kk * kk)) / kk;
}
}  // namespace

long long Rng::binomial_btrd(long long t, double p) {
  // Hormann's BTRD transformed-rejection sampler; exact for t*p >= 10, p <= 1/2.
  const double n = static_cast<double>(t);
  const double q = 1.0 - p;
  const double np = n * p;
  const double spq = std::sqrt(np * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = np + 0.5;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double vr = 0.92 - 4.2 / b;
  const double urvr = 0.86 * vr;
  const double m = std::floor((n + 1.0) * p);
  const double r = p / q;
  const double nr = (n + 1.0) * r;

  for (;;) {
    double v = uniform01();
    double u;
    if (v <= urvr) {
      u = v / vr - 0.43;
      return static_cast<long long>(
          std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + c));
    }
    if (v >= vr) {
      u = uniform01() - 0.5;
    } else {
      u = v / vr - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = uniform01() * vr;
    }
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0.0 || kd > n) continue;
    const long long k = static_cast<long long>(kd);
    v = v * alpha / (a / (us * us) + b);
    const long long km = std::llabs(k - static_cast<long long>(m));
    if (km <= 15) {
      // recursive evaluation of the ratio of pmfs
      double f = 1.0;
      if (m < k) {
        for (long long i = static_cast<long long>(m) + 1; i <= k; ++i)
          f *= (nr / static_cast<double>(i) - r);
        if (v <= f) return k;
      } else {
        for (long long i = k + 1; i <= static_cast<long long>(m); ++i)
          v *= (nr / static_cast<double>(i) - r);
        if (v <= f) return k;
      }
      continue;
    }
    v = std::log(v);
    const double rho = (static_cast<double>(km) / np) *
                       (((static_cast<double>(km) / 3.0 + 0.625) *
                             static_cast<double>(km) +
                         1.0 / 6.0) /
                            np +
                        0.5);
    const double tt = -static_cast<double>(km) * static_cast<double>(km) /
                      (2.0 * spq * spq);
    if (v < tt - rho) return k;
    if (v > tt + rho) continue;
    const double nm = n - m + 1.0;
    const double h = (m + 0.5) * std::log((m + 1.0) / (r * nm)) +
                     fc(static_cast<long long>(m)) +
                     fc(static_cast<long long>(n - m));
    const double nk = n - kd + 1.0;
    if (v <= h - fc(k) - fc(t - k) + (kd + 0.5) * std::log(nk * r / (kd + 1.0)) +
                 (n + 1.0) * std::log(nm / nk)) {
      return k;
    }
  }
}

}  // namespace tallip
