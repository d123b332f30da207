#pragma once

#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"
#include "tallip/rng.hpp"

namespace tallip {

struct LewisParams {
  double p = 4.0;
  double epsilon = 0.1;
  Index iterations = 0;  // T = ceil(2 log(n/d) / epsilon)

  double alpha() const { return 2.0 / (p - 2.0); }
  static LewisParams make(double p, double epsilon, Index n, Index d);
};

struct LewisResult {
  Vector weights;  // entrywise positive
  double fp_residual = 0.0;
  LewisParams params;

  nlohmann::json to_json() const;
};

enum class ScoreEstimation {
  Exact,     // dense leverage scores each round
  Sketched,  // (1 +- eps/4) scores through a spectral sketch
};

/// Fixed-point-approximate lp-Lewis weights by the averaged iteration
/// v <- sigma(V^{1/2-1/p} A) started from the uniform vector d/n. The first
/// half of the iterates is treated as burn-in and the returned weights are
/// the average of the second half, which keeps the fixed-point residual
/// below epsilon even when some true weights are far below d/n. The
/// residual max_i |v_i / sigma_i(V^{1/2-1/p}A) - 1| is recomputed densely
/// and stored.
LewisResult fp_lewis_weights(const Matrix& A, const LewisParams& params,
                             ScoreEstimation mode, Rng rng, CostLedger& ledger,
                             std::string_view label = "lewis");

/// Stability diagnostic rho_i = sigma_i(V^{1/2} A) / v_i^{1+alpha} with
/// alpha = 2/(p-2). All ones exactly at v = w^{(p)}(A)^{1-2/p}.
Vector rho(const Matrix& A, double p, const Vector& v);

/// Entrywise (1 +- eps)-multiplicative approximation of the lp-Lewis weights
/// for p >= 4, obtained by running the fixed-point iteration at precision
/// mu = eps * alpha^2 / (kappa sqrt(d)) and certifying the result through the
/// rho diagnostic of v^{1-2/p}.
LewisResult multiplicative_lewis_weights(const Matrix& A, double p, double eps,
                                         Rng rng, CostLedger& ledger,
                                         double kappa = 4.0,
                                         std::string_view label = "lewis");

/// Damped fixed-point iteration run to a measured residual certificate
/// max_i |ln rho_i(v^{1-2/p})| <= roughly tol. Much cheaper than the averaged
/// schedule at high precision; used by the barrier oracles. Charges n row
/// queries per round to the ledger when one is given.
Vector lewis_weights_fixed_point(const Matrix& A, double p, double tol,
                                 Index max_rounds = 400,
                                 CostLedger* ledger = nullptr,
                                 std::string_view label = "lewis");

}  // namespace tallip
