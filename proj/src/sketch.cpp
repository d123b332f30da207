#include "tallip/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace tallip {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_dim(Index d) { return std::log(static_cast<double>(std::max<Index>(d, 2))); }

Matrix stack_rows(const std::vector<Vector>& rows, Index d) {
  Matrix M(static_cast<Index>(rows.size()), d);
  for (Index i = 0; i < M.rows(); ++i) M.row(i) = rows[static_cast<size_t>(i)].transpose();
  return M;
}
}  // namespace

RowOracle RowOracle::dense(const Matrix& M, CostLedger* ledger, std::string label) {
  return RowOracle{M.rows(), M.cols(),
                   [&M](Index i) { return Vector(M.row(i).transpose()); }, ledger,
                   std::move(label)};
}

RowOracle RowOracle::row_scaled(const Matrix& M, const Vector& inv_scale,
                                CostLedger* ledger, std::string label) {
  return RowOracle{M.rows(), M.cols(),
                   [&M, &inv_scale](Index i) {
                     return Vector(inv_scale[i] * M.row(i).transpose());
                   },
                   ledger, std::move(label)};
}

Matrix RowOracle::materialize() const {
  Matrix M(n, d);
  for (Index i = 0; i < n; ++i) M.row(i) = row(i).transpose();
  return M;
}

void WeightVector::validate() const {
  for (Index i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i]) || values[i] < 0.0)
      throw std::domain_error("weight vector entries must be nonnegative (inf allowed)");
  }
}

nlohmann::json SpectralSketch::to_json() const {
  nlohmann::json j;
  j["source_indices"] = source_indices;
  j["scales"] = std::vector<double>(scales.data(), scales.data() + scales.size());
  j["epsilon"] = epsilon;
  return j;
}

PsdPinv pinv_psd(const Matrix& gram, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw SolverError("pinv_psd: eigendecomposition failed");
  const Vector& w = eig.eigenvalues();
  const Matrix& V = eig.eigenvectors();
  const double lmax = std::max(0.0, w.maxCoeff());
  const double cut = rel_cutoff * lmax;
  Vector inv = Vector::Zero(w.size());
  Index rank = 0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w[i] > cut && w[i] > 0.0) {
      inv[i] = 1.0 / w[i];
      ++rank;
    }
  }
  return PsdPinv{V * inv.asDiagonal() * V.transpose(), rank, lmax};
}

Vector leverage_scores_exact(const Matrix& A) {
  if (!A.allFinite()) throw std::invalid_argument("leverage scores: matrix must be finite");
  const PsdPinv p = pinv_psd(A.transpose() * A);
  // sigma_i = row_i . (P row_i)
  return ((A * p.pinv).cwiseProduct(A)).rowwise().sum();
}

LeverageEstimator LeverageEstimator::direct(const Matrix& B, double kernel_tol) {
  LeverageEstimator est;
  est.mode_ = Mode::Direct;
  est.kernel_tol_ = kernel_tol;
  const Matrix gram = B.transpose() * B;
  const PsdPinv p = pinv_psd(gram);
  est.pinv_ = p.pinv;
  est.row_proj_ = gram * p.pinv;
  est.singular_ = p.rank < B.cols();
  return est;
}

LeverageEstimator LeverageEstimator::jl(const Matrix& B, double eps, Index n_hint,
                                        Rng rng, double beta, double kernel_tol) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("jl_build: eps in (0,1] required");
  LeverageEstimator est;
  est.mode_ = Mode::JL;
  est.kernel_tol_ = kernel_tol;
  est.epsilon_ = eps;
  const Index D = B.rows();
  const Index d = B.cols();
  const Index k = static_cast<Index>(
      std::ceil(beta * std::log(static_cast<double>(std::max<Index>(n_hint, 2))) / (eps * eps)));

  const Matrix gram = B.transpose() * B;
  const PsdPinv p = pinv_psd(gram);
  est.singular_ = p.rank < d;

  // C = Pi B (B'B)^+ with Rademacher Pi, entries +-1/sqrt(k)
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix Pi(k, D);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < D; ++j) Pi(i, j) = rng.bernoulli(0.5) ? scale : -scale;
  est.C_ = Pi * (B * p.pinv);

  // C' = Pi' (I - (B'B)(B'B)^+); zero iff B'B nonsingular
  Matrix ker_proj = Matrix::Identity(d, d) - gram * p.pinv;
  Matrix Pip(k, d);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < d; ++j) Pip(i, j) = rng.bernoulli(0.5) ? scale : -scale;
  est.Cp_ = Pip * ker_proj;
  return est;
}

double LeverageEstimator::query(const Vector& a) const {
  const double an = a.norm();
  if (an == 0.0) return 0.0;
  if (mode_ == Mode::Direct) {
    if (singular_) {
      const Vector resid = a - row_proj_ * a;
      if (resid.norm() > kernel_tol_ * an) return kInf;
    }
    return a.dot(pinv_ * a);
  }
  if (singular_) {
    const Vector r = Cp_ * a;
    if (r.norm() > kernel_tol_ * an) return kInf;
  }
  return (C_ * a).squaredNorm();
}

SpectralSketch weighted_subsample(const RowOracle& A, const WeightVector& w,
                                  double eps, Rng& rng, const SubsampleOptions& opts) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("weighted_subsample: eps in (0,1]");
  w.validate();
  if (w.values.size() != A.n) throw std::invalid_argument("weight length mismatch");
  const double factor = opts.c_const * log_dim(A.d) / (eps * eps);

  std::vector<Vector> rows;
  std::vector<Index> idx;
  std::vector<double> scales;
  for (Index i = 0; i < A.n; ++i) {
    const double wi = w.values[i];
    double p;
    if (std::isinf(wi)) {
      p = 1.0;
    } else {
      p = std::min(1.0, wi * factor);
    }
    if (p <= 0.0) continue;
    if (p >= 1.0 || rng.uniform01() < p) {
      rows.push_back(A.row(i) / std::sqrt(p));
      idx.push_back(i);
      scales.push_back(1.0 / std::sqrt(p));
    }
  }
  SpectralSketch sk;
  sk.rows = stack_rows(rows, A.d);
  sk.source_indices = std::move(idx);
  sk.scales = Eigen::Map<Vector>(scales.data(), static_cast<Index>(scales.size()));
  sk.epsilon = eps;
  return sk;
}

namespace {

/// Scores one pass of rows through the estimator, samples with the bracket
/// weights w_i = 2 * sigma~_i, and returns the kept rescaled rows.
SpectralSketch halving_pass(const RowOracle& A, const std::vector<Index>& level_rows,
                            const LeverageEstimator& est, double eps, Rng& rng,
                            const HalvingOptions& opts) {
  const double factor = opts.c_const * log_dim(A.d) / (eps * eps);
  std::vector<Vector> rows;
  std::vector<Index> idx;
  std::vector<double> scales;
  for (Index i : level_rows) {
    Vector a = A.row(i);
    const double sig = est.query(a);
    double p;
    if (std::isinf(sig)) {
      p = 1.0;  // row outside the sketch row space: forced in
    } else {
      p = std::min(1.0, 2.0 * sig * factor);
    }
    if (p <= 0.0) continue;
    if (p >= 1.0 || rng.uniform01() < p) {
      const double s = 1.0 / std::sqrt(p);
      rows.push_back(s * a);
      idx.push_back(i);
      scales.push_back(s);
    }
  }
  SpectralSketch sk;
  sk.rows = stack_rows(rows, A.d);
  sk.source_indices = std::move(idx);
  sk.scales = Eigen::Map<Vector>(scales.data(), static_cast<Index>(scales.size()));
  sk.epsilon = eps;
  return sk;
}

LeverageEstimator make_estimator(const Matrix& B, Index n_hint, Rng& rng,
                                 const HalvingOptions& opts) {
  if (opts.score_mode == LeverageEstimator::Mode::Direct)
    return LeverageEstimator::direct(B);
  // (1 +- 1/2)-accurate scores suffice for the bracket 2s <= w <= 4s
  return LeverageEstimator::jl(B, 0.5, n_hint, rng.stream("jl"), opts.jl_beta);
}

}  // namespace

SpectralSketch repeated_halving(const RowOracle& A, double eps, Rng rng,
                                CostLedger& ledger, std::string_view label,
                                const HalvingOptions& opts) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("repeated_halving: eps in (0,1]");
  const Index n = A.n;
  const Index d = A.d;
  const std::string lbl(label);
  RowOracle counted = A;
  counted.ledger = &ledger;
  counted.label = lbl;

  if (opts.modeled_kind) {
    ledger.add_modeled(lbl, modeled_quantum_cost(*opts.modeled_kind,
                                                 static_cast<double>(n),
                                                 static_cast<double>(d), eps));
  }

  const double thresh = opts.c_const * static_cast<double>(d) * log_dim(d) / (eps * eps);
  if (static_cast<double>(n) <= thresh) {
    // no sampling needed: the matrix is its own sketch, exactly
    SpectralSketch sk;
    sk.rows = counted.materialize();
    sk.source_indices.resize(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) sk.source_indices[static_cast<size_t>(i)] = i;
    sk.scales = Vector::Ones(n);
    sk.epsilon = eps;
    return sk;
  }

  const HalvingChain chain = HalvingChain::make(rng.stream("chain").seed(), n, d);
  const int L = chain.depth;

  // survivors per level, computed lazily from the chain
  auto level_rows = [&](int level) {
    std::vector<Index> out;
    for (Index i = 0; i < n; ++i)
      if (chain_member(chain, i, level)) out.push_back(i);
    return out;
  };

  // B_L = A_L, materialized
  std::vector<Index> base = level_rows(L);
  Matrix B(static_cast<Index>(base.size()), d);
  for (Index k = 0; k < B.rows(); ++k)
    B.row(k) = counted.row(base[static_cast<size_t>(k)]).transpose();

  Rng sample_rng = rng.stream("sample");
  for (int l = L - 1; l >= 1; --l) {
    LeverageEstimator est = make_estimator(B, n, sample_rng, opts);
    SpectralSketch bl = halving_pass(counted, level_rows(l), est, 0.5, sample_rng, opts);
    B = std::move(bl.rows);
  }

  LeverageEstimator est = make_estimator(B, n, sample_rng, opts);
  std::vector<Index> all(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  return halving_pass(counted, all, est, eps, sample_rng, opts);
}

}  // namespace tallip
