#pragma once

#include <functional>
#include <string_view>
#include <utility>

#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"
#include "tallip/rng.hpp"
#include "tallip/sketch.hpp"

namespace tallip {

/// Estimate y = B'v in the (B'B)^{-1} norm by preconditioned row sampling.
struct MatVecRequest {
  RowOracle B;
  std::function<double(Index)> v;
  double v_inf_bound = 1.0;  // must dominate |v_i| on every sampled row
  double delta = 0.1;        // target error in the (B'B)^{-1} norm
  double failure_prob = 0.01;
};

struct MatVecStats {
  std::uint64_t samples = 0;
  Index groups = 0;
  std::uint64_t group_size = 0;
};

/// Preconditions with a 1/2-accurate spectral sketch W~ of B'B, samples
/// X = n v_l W~^{-1/2} B' e_l with l uniform, and takes a per-coordinate
/// median of group means (G = ceil(8 ln(1/failure_prob)) groups of
/// ceil(16 TrBound / delta^2 / G) samples, TrBound = (3/2) n d bound^2).
/// Returns y~ = W~^{1/2} median with ||y~ - B'v||_{(B'B)^{-1}} <= delta with
/// probability at least 1 - failure_prob.
Vector estimate_matvec(const MatVecRequest& req, Rng rng, CostLedger& ledger,
                       std::string_view label = "matvec",
                       MatVecStats* stats = nullptr, bool log_modeled = true);

/// Direct accumulation of B'v; test oracle and exact-mode path.
Vector exact_matvec(const Matrix& B, const Vector& v);

/// Both sides of ||B'v - B'Dv||_{(B'B)^{-1}} <= eps ||v||_2 for diagonal D
/// with entries in [1-eps, 1+eps], computed densely.
std::pair<double, double> perturbation_bound_check(const Matrix& B, const Vector& v,
                                                   const Vector& diag);

}  // namespace tallip
