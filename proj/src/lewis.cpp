#include "tallip/lewis.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tallip/sketch.hpp"

namespace tallip {

namespace {

/// Leverage scores of diag(v^e) * A. Throws RankDeficient when the rescaled
/// matrix loses column rank.
Vector scores_of_rescaled(const Matrix& A, const Vector& v, double e,
                          bool require_full_rank = true) {
  Matrix M = v.array().pow(e).matrix().asDiagonal() * A;
  const PsdPinv p = pinv_psd(M.transpose() * M);
  if (require_full_rank && p.rank < A.cols())
    throw RankDeficient("lewis weights: rescaled matrix is rank deficient");
  return ((M * p.pinv).cwiseProduct(M)).rowwise().sum();
}

Vector noisy_scores(const Matrix& A, const Vector& v, double e, double noise,
                    ScoreEstimation mode, Rng& rng, CostLedger& ledger,
                    std::string_view label) {
  ledger.add_classical(label, static_cast<std::uint64_t>(A.rows()));
  if (mode == ScoreEstimation::Exact) return scores_of_rescaled(A, v, e);
  // Sketch route: B'B ~ M'M at noise/2, then exact generalized scores
  // against B give (1 +- noise)-multiplicative estimates.
  Matrix M = v.array().pow(e).matrix().asDiagonal() * A;
  CostLedger scratch;
  HalvingOptions opts;
  opts.modeled_kind = std::nullopt;
  SpectralSketch sk = repeated_halving(RowOracle::dense(M), std::min(1.0, noise / 2.0),
                                       rng.stream("score_sketch", rng.bits()), scratch,
                                       "score_sketch", opts);
  LeverageEstimator est = LeverageEstimator::direct(sk.rows);
  Vector out(M.rows());
  for (Index i = 0; i < M.rows(); ++i) {
    const double s = est.query(M.row(i).transpose());
    if (std::isinf(s)) throw RankDeficient("lewis weights: sketch lost row space");
    out[i] = s;
  }
  return out;
}

}  // namespace

LewisParams LewisParams::make(double p, double epsilon, Index n, Index d) {
  if (!(p >= 2.0)) throw std::domain_error("lewis: p >= 2 required");
  if (!(epsilon > 0.0) || epsilon >= 1.0) throw std::domain_error("lewis: eps in (0,1)");
  if (d < 1 || n < d) throw std::domain_error("lewis: n >= d >= 1 required");
  LewisParams lp;
  lp.p = p;
  lp.epsilon = epsilon;
  const double ratio = std::max(2.0, static_cast<double>(n) / static_cast<double>(d));
  lp.iterations = static_cast<Index>(std::ceil(2.0 * std::log(ratio) / epsilon));
  return lp;
}

nlohmann::json LewisResult::to_json() const {
  nlohmann::json j;
  j["p"] = params.p;
  j["epsilon"] = params.epsilon;
  j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  j["fp_residual"] = fp_residual;
  return j;
}

LewisResult fp_lewis_weights(const Matrix& A, const LewisParams& params,
                             ScoreEstimation mode, Rng rng, CostLedger& ledger,
                             std::string_view label) {
  const Index n = A.rows();
  const Index d = A.cols();
  if (pinv_psd(A.transpose() * A).rank < d)
    throw RankDeficient("fp_lewis_weights: A must have full column rank");
  const double e = 0.5 - 1.0 / params.p;
  const Index T = std::max<Index>(params.iterations, 2);
  const Index burn = T / 2;

  ledger.add_modeled(label, modeled_quantum_cost(CostKind::LewisWeights,
                                                 static_cast<double>(n),
                                                 static_cast<double>(d),
                                                 params.epsilon));

  Vector v = Vector::Constant(n, static_cast<double>(d) / static_cast<double>(n));
  Vector acc = Vector::Zero(n);
  Index kept = 0;
  Rng score_rng = rng.stream("scores");
  for (Index k = 1; k <= T; ++k) {
    v = noisy_scores(A, v, e, params.epsilon / 4.0, mode, score_rng, ledger, label);
    if (k > burn) {
      acc += v;
      ++kept;
    }
  }
  LewisResult res;
  res.params = params;
  res.weights = acc / static_cast<double>(kept);
  const Vector ref = scores_of_rescaled(A, res.weights, e);
  res.fp_residual = ((res.weights.array() / ref.array()) - 1.0).abs().maxCoeff();
  return res;
}

Vector rho(const Matrix& A, double p, const Vector& v) {
  if (!(p > 2.0)) throw std::domain_error("rho: p > 2 required");
  for (Index i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) throw std::domain_error("rho: v must be entrywise positive");
  const double alpha = 2.0 / (p - 2.0);
  const Vector sig = scores_of_rescaled(A, v, 0.5, false);
  return sig.array() / v.array().pow(1.0 + alpha);
}

LewisResult multiplicative_lewis_weights(const Matrix& A, double p, double eps,
                                         Rng rng, CostLedger& ledger, double kappa,
                                         std::string_view label) {
  if (!(p >= 4.0))
    throw std::domain_error("multiplicative lewis weights: stability needs p >= 4");
  if (!(eps > 0.0) || eps >= 1.0) throw std::domain_error("lewis: eps in (0,1)");
  const Index n = A.rows();
  const Index d = A.cols();
  const double alpha = 2.0 / (p - 2.0);
  const double mu = eps * alpha * alpha / (kappa * std::sqrt(static_cast<double>(d)));

  LewisParams inner = LewisParams::make(p, mu, n, d);
  LewisResult res = fp_lewis_weights(A, inner, ScoreEstimation::Exact, rng, ledger, label);

  // certify through the stability diagnostic of the converted vector: the
  // multiplicative claim only holds when rho(v^{1-2/p}) stays near ones
  const Vector hat = res.weights.array().pow(1.0 - 2.0 / p);
  const Vector r = rho(A, p, hat);
  const double log_gap = r.array().log().abs().maxCoeff();
  if (log_gap > std::log((1.0 + mu) / (1.0 - mu)) + 1e-9)
    throw NonConvergence("multiplicative lewis weights: stability certificate failed");
  res.params.epsilon = eps;
  return res;
}

Vector lewis_weights_fixed_point(const Matrix& A, double p, double tol,
                                 Index max_rounds, CostLedger* ledger,
                                 std::string_view label) {
  if (!(p > 2.0)) throw std::domain_error("lewis fixed point: p > 2 required");
  const Index n = A.rows();
  const Index d = A.cols();
  const double e = 0.5 - 1.0 / p;
  Vector v = Vector::Constant(n, static_cast<double>(d) / static_cast<double>(n));
  for (Index k = 0; k < max_rounds; ++k) {
    if (ledger) ledger->add_classical(label, static_cast<std::uint64_t>(n));
    const Vector nxt = scores_of_rescaled(A, v, e);
    const double res = ((nxt.array() / v.array()).log()).abs().maxCoeff();
    v = nxt;
    if (res <= tol) return v;
  }
  throw NonConvergence("lewis fixed point: residual did not reach tolerance");
}

}  // namespace tallip
