#pragma once

#include <string_view>

#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"
#include "tallip/lewis.hpp"
#include "tallip/oracle.hpp"
#include "tallip/rng.hpp"
#include "tallip/sketch.hpp"

namespace tallip {

/// Self-concordant barrier family for the polytope Ax >= b.
struct BarrierKind {
  enum class Tag { Log, Volumetric, Hybrid, Lewis };
  Tag tag = Tag::Log;
  double p = 4.0;  // Lewis only; stability requires p >= 4

  static BarrierKind log_barrier() { return {Tag::Log, 0.0}; }
  static BarrierKind volumetric() { return {Tag::Volumetric, 0.0}; }
  static BarrierKind hybrid() { return {Tag::Hybrid, 0.0}; }
  static BarrierKind lewis(double p) { return {Tag::Lewis, p}; }
  /// Default p honoring both p >= 4 and the p ~ log n regime.
  static BarrierKind lewis_default(Index n);

  /// Hybrid mixing weight rho = (d-1)/(n-1).
  double hybrid_rho(Index n, Index d) const;
  const char* name() const;
};

/// Iterate bundle carried by the path-following loop.
struct BarrierState {
  Vector x;
  Vector s;  // Ax - b, entrywise positive
  double eta = 0.0;
  Vector weights;  // cached diagonal (sigma or lewis) from the last oracle call
};

/// s = Ax - b; throws InfeasibleInterior naming the first violated row.
Vector slacks(const LpInstance& inst, const Vector& x);

/// Exact barrier value by dense computation:
///   Log:        -sum log s_i
///   Volumetric: 1/2 log det(A' S^-2 A)
///   Hybrid:     volumetric + rho * log
///   Lewis:      1/2 log det(A' S^-1 W^{1-2/p} S^-1 A), W the lp-Lewis
///               weights of S^-1 A at reference precision. The 1/2 keeps the
///               value consistent with the gradient -A' S^-1 W 1 used below.
double barrier_value(const BarrierKind& kind, const LpInstance& inst, const Vector& x);

/// Exact gradient: -A' S^-1 w with w = 1, sigma, sigma + rho, or the Lewis
/// weights, per kind.
Vector gradient_exact(const BarrierKind& kind, const LpInstance& inst, const Vector& x);

/// Exact Hessian surrogate: A' S^-1 diag(w) S^-1 A with the same w. Exact
/// Hessian for Log; a constant-factor spectral surrogate otherwise.
Matrix hessian_surrogate_exact(const BarrierKind& kind, const LpInstance& inst,
                               const Vector& x);

struct SketchOptions {
  double c_const = 8.0;
  LeverageEstimator::Mode score_mode = LeverageEstimator::Mode::Direct;
  double kappa_g = 2.0;       // weight precision zeta/(kappa_g sqrt(d)) in gradients
  double lewis_kappa = 4.0;   // mu = eps alpha^2/(kappa sqrt d) in Lewis conversion
  double failure_prob = 0.01;
};

/// Sketched Hessian surrogate Q ~eps~ (surrogate) w.h.p., built by repeated
/// halving on the weighted slack-rescaled rows; the weight estimates and the
/// sketch each take an eps/3 share so the composition stays within eps.
Matrix hessian_sketch(const BarrierKind& kind, const LpInstance& inst, const Vector& x,
                      double eps, Rng rng, CostLedger& ledger,
                      const SketchOptions& opts = {});

/// Gradient estimate g~ with ||g~ - g||_{H^-1} <= zeta w.h.p., via the
/// preconditioned matrix-vector estimator on B = sqrt(W) S^-1 A, v = sqrt(W) 1.
Vector gradient_estimate(const BarrierKind& kind, const LpInstance& inst,
                         const Vector& x, double zeta, Rng rng, CostLedger& ledger,
                         const SketchOptions& opts = {});

/// Barrier complexity parameter:
///   Log -> n, Volumetric -> sqrt(n) d, Hybrid -> kappa_h sqrt(nd),
///   Lewis -> d v_p^2 with v_p = (p+2)^{3/2} n^{1/(p+2)} + 4 max(p,2)^{2.5}.
double complexity(const BarrierKind& kind, Index n, Index d, double kappa_h = 1.0);

}  // namespace tallip
