#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"

namespace tallip {

/// A tall linear program: minimize c'x subject to Ax >= b, with n >= d.
/// When x0 is present it must be strictly interior (Ax0 - b > 0).
struct LpInstance {
  Index n = 0;
  Index d = 0;
  Matrix A;
  Vector b;
  Vector c;
  std::optional<Vector> x0;

  Index row_sparsity() const;
  /// Throws std::invalid_argument / InfeasibleInterior on violated invariants.
  void validate() const;
};

/// One row of the constraint data.
struct RowPair {
  Vector a;
  double b = 0.0;
};

/// Reads row i (1-based per the query model used throughout) and charges one
/// classical row query to `label`.
RowPair row_query(const LpInstance& inst, Index i, CostLedger& ledger,
                  std::string_view label);

/// Lazily evaluable nested subsampling A_L ⊆ ... ⊆ A_1 ⊆ A where each level
/// keeps rows independently with probability 1/2. Membership of (row, level)
/// is a keyed hash of (seed, row, level) thresholded at 1/2, so the chain is
/// O(1) per query and never materialized.
struct HalvingChain {
  std::uint64_t seed = 0;
  int depth = 0;  // L = ceil(log2(n/d))

  static HalvingChain make(std::uint64_t seed, Index n, Index d);
};

/// True iff row i survives levels 1..level. Level 0 always holds.
bool chain_member(const HalvingChain& chain, Index i, int level);

enum class CostKind {
  SpectralApprox,
  LeverageScores,
  LewisWeights,
  MatVec,
  HessianLog,
  HessianVol,
  HessianLewis,
  GradLog,
  GradVol,
  GradLewis,
};

/// Leading-order modeled quantum row-query count for the given subroutine,
/// with polylog factors dropped and unit constants:
///   SpectralApprox, LeverageScores, HessianLog, HessianVol -> sqrt(n*d)/eps
///   LewisWeights, HessianLewis                             -> sqrt(n)*d^1.5/eps^2
///   MatVec, GradLog, GradVol                               -> sqrt(n)*d/eps
///   GradLewis                                              -> sqrt(n)*d^2.5/eps^2
double modeled_quantum_cost(CostKind kind, double n, double d, double eps);

/// Random tall LP with bounded entries, an embedded bounding box, and a
/// certified strictly feasible x0 (b is constructed as A*x0 - s with s > 0).
LpInstance gen_random_tall_lp(Index n, Index d, std::uint64_t seed);

/// Search-style block matrix: d column blocks of n/d rows, block j carrying
/// bitstring z_j in column j. Satisfies A'A = diag(|z_1|, ..., |z_d|).
Matrix gen_search_hard_matrix(Index n, Index d,
                              const std::vector<std::vector<std::uint8_t>>& z);

}  // namespace tallip
