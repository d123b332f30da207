#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"
#include "tallip/oracle.hpp"
#include "tallip/rng.hpp"

namespace tallip {

/// Row access to an n-by-d matrix, possibly defined implicitly (a rescaled
/// view, a chain level, ...). Fetches are charged to the ledger when one is
/// attached. Rows are indexed 0-based here; the 1-based convention is only
/// for the user-facing row_query operation.
struct RowOracle {
  Index n = 0;
  Index d = 0;
  std::function<Vector(Index)> fetch;
  CostLedger* ledger = nullptr;
  std::string label;

  Vector row(Index i) const {
    if (ledger) ledger->add_classical(label, 1);
    return fetch(i);
  }
  static RowOracle dense(const Matrix& M, CostLedger* ledger = nullptr,
                         std::string label = {});
  /// View of diag(s)^{-1} * M without forming it.
  static RowOracle row_scaled(const Matrix& M, const Vector& inv_scale,
                              CostLedger* ledger = nullptr, std::string label = {});
  Matrix materialize() const;  // fetches every row (charged)
};

/// Nonnegative per-row sampling weights; +inf forces a row in.
struct WeightVector {
  Vector values;
  void validate() const;  // no NaN, no negatives
};

/// A rescaled row subset B of some tall matrix, with provenance, certifying
/// B'B ~ A'A up to the stored epsilon.
struct SpectralSketch {
  Matrix rows;  // m x d, already rescaled
  std::vector<Index> source_indices;
  Vector scales;  // 1/sqrt(p_i)
  double epsilon = 0.0;

  Index row_count() const { return rows.rows(); }
  Matrix gram() const { return rows.transpose() * rows; }
  nlohmann::json to_json() const;
};

struct PsdPinv {
  Matrix pinv;
  Index rank = 0;
  double lambda_max = 0.0;
};

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via
/// eigendecomposition with relative cutoff `rel_cutoff * lambda_max`.
PsdPinv pinv_psd(const Matrix& gram, double rel_cutoff = 1e-12);

/// sigma_i(A) = a_i' (A'A)^+ a_i for every row. Scores lie in [0,1] and sum
/// to rank(A).
Vector leverage_scores_exact(const Matrix& A);

/// Answers generalized leverage score queries sigma^B_i(a) = a'(B'B)^+ a, or
/// +inf when a has a component in ker(B). Two modes:
///  - Direct: exact quadratic form against (B'B)^+.
///  - JL: sketched query ||C a||^2 with C = Pi B (B'B)^+, a (1 +- eps)
///    estimate at O(r k) arithmetic per row. The kernel test uses
///    C' = Pi' (I - (B'B)(B'B)^+).
class LeverageEstimator {
 public:
  enum class Mode { Direct, JL };

  static LeverageEstimator direct(const Matrix& B, double kernel_tol = 1e-8);
  static LeverageEstimator jl(const Matrix& B, double eps, Index n_hint, Rng rng,
                              double beta = 12.0, double kernel_tol = 1e-8);

  double query(const Vector& a) const;
  Mode mode() const { return mode_; }
  double epsilon() const { return epsilon_; }
  Index sketch_dim() const { return C_.rows(); }
  const Matrix& pinv_gram() const { return pinv_; }
  const Matrix& C() const { return C_; }
  const Matrix& C_prime() const { return Cp_; }

 private:
  Mode mode_ = Mode::Direct;
  double kernel_tol_ = 1e-8;
  double epsilon_ = 0.0;
  Matrix pinv_;       // (B'B)^+                  (Direct)
  Matrix row_proj_;   // (B'B)(B'B)^+             (Direct kernel test)
  Matrix C_;          // Pi B (B'B)^+             (JL)
  Matrix Cp_;         // Pi' (I - (B'B)(B'B)^+)   (JL kernel test)
  bool singular_ = false;
};

struct SubsampleOptions {
  double c_const = 8.0;  // p_i = min{1, c w_i log(d) / eps^2}
};

/// Keeps row i independently with probability p_i = min{1, c w_i log(d)/eps^2}
/// and rescales kept rows by 1/sqrt(p_i), so E[B'B] = A'A.
SpectralSketch weighted_subsample(const RowOracle& A, const WeightVector& w,
                                  double eps, Rng& rng,
                                  const SubsampleOptions& opts = {});

struct HalvingOptions {
  double c_const = 8.0;
  double jl_beta = 12.0;
  LeverageEstimator::Mode score_mode = LeverageEstimator::Mode::Direct;
  /// Log the modeled quantum cost under this kind; nullopt skips modeled
  /// logging (used when a caller accounts the cost under its own kind).
  std::optional<CostKind> modeled_kind = CostKind::SpectralApprox;
};

/// Repeated halving: walks a lazy uniform subsampling chain from the
/// smallest level up, estimating generalized leverage scores of each level
/// against the sketch of the finer level, and finishes with one weighted
/// subsampling pass over all rows at accuracy eps. Returns B with
/// B'B ~eps~ A'A (w.h.p.) and O(d log d / eps^2) rows. When n is already at
/// most the sampling threshold the input is returned unchanged.
SpectralSketch repeated_halving(const RowOracle& A, double eps, Rng rng,
                                CostLedger& ledger, std::string_view label,
                                const HalvingOptions& opts = {});

}  // namespace tallip
