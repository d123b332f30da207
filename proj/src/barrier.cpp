#include "tallip/barrier.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "tallip/matvec.hpp"

namespace tallip {

namespace {

Matrix slack_scaled(const LpInstance& inst, const Vector& s) {
  return s.cwiseInverse().asDiagonal() * inst.A;
}

double half_logdet(const Matrix& gram) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("barrier value: gram matrix not positive definite");
  double v = 0.0;
  const Matrix& L = llt.matrixLLT();
  for (Index i = 0; i < L.rows(); ++i) v += std::log(L(i, i));
  return v;  // = 1/2 log det(gram)
}

/// Diagonal weights defining gradient and Hessian surrogate per kind.
/// Log = ones, Volumetric = sigma, Hybrid = sigma + rho, Lewis = w^{(p)}.
Vector exact_weights(const BarrierKind& kind, const LpInstance& inst, const Matrix& M) {
  switch (kind.tag) {
    case BarrierKind::Tag::Log:
      return Vector::Ones(inst.n);
    case BarrierKind::Tag::Volumetric:
      return leverage_scores_exact(M);
    case BarrierKind::Tag::Hybrid:
      return leverage_scores_exact(M).array() + kind.hybrid_rho(inst.n, inst.d);
    case BarrierKind::Tag::Lewis:
      return lewis_weights_fixed_point(M, kind.p, 1e-10, 1000);
  }
  throw std::logic_error("unknown barrier kind");
}

}  // namespace

BarrierKind BarrierKind::lewis_default(Index n) {
  const double p = std::max(4.0, std::ceil(std::log(static_cast<double>(std::max<Index>(n, 2)))));
  return lewis(p);
}

double BarrierKind::hybrid_rho(Index n, Index d) const {
  if (n < 2) throw std::domain_error("hybrid barrier requires n > 1");
  return static_cast<double>(d - 1) / static_cast<double>(n - 1);
}

const char* BarrierKind::name() const {
  switch (tag) {
    case Tag::Log: return "log";
    case Tag::Volumetric: return "volumetric";
    case Tag::Hybrid: return "hybrid";
    case Tag::Lewis: return "lewis";
  }
  return "?";
}

Vector slacks(const LpInstance& inst, const Vector& x) {
  if (x.size() != inst.d) throw std::invalid_argument("slacks: x length mismatch");
  Vector s = inst.A * x - inst.b;
  for (Index i = 0; i < inst.n; ++i)
    if (!(s[i] > 0.0)) throw InfeasibleInterior(i + 1, s[i]);
  return s;
}

double barrier_value(const BarrierKind& kind, const LpInstance& inst, const Vector& x) {
  const Vector s = slacks(inst, x);
  switch (kind.tag) {
    case BarrierKind::Tag::Log:
      return -s.array().log().sum();
    case BarrierKind::Tag::Volumetric: {
      const Matrix M = slack_scaled(inst, s);
      return half_logdet(M.transpose() * M);
    }
    case BarrierKind::Tag::Hybrid: {
      const Matrix M = slack_scaled(inst, s);
      return half_logdet(M.transpose() * M) -
             kind.hybrid_rho(inst.n, inst.d) * s.array().log().sum();
    }
    case BarrierKind::Tag::Lewis: {
      const Matrix M = slack_scaled(inst, s);
      const Vector w = lewis_weights_fixed_point(M, kind.p, 1e-10, 1000);
      const Vector wp = w.array().pow(1.0 - 2.0 / kind.p);
      return half_logdet(M.transpose() * wp.asDiagonal() * M);
    }
  }
  throw std::logic_error("unknown barrier kind");
}

Vector gradient_exact(const BarrierKind& kind, const LpInstance& inst, const Vector& x) {
  const Vector s = slacks(inst, x);
  const Matrix M = slack_scaled(inst, s);
  const Vector w = exact_weights(kind, inst, M);
  return -(M.transpose() * w);
}

Matrix hessian_surrogate_exact(const BarrierKind& kind, const LpInstance& inst,
                               const Vector& x) {
  const Vector s = slacks(inst, x);
  const Matrix M = slack_scaled(inst, s);
  const Vector w = exact_weights(kind, inst, M);
  return M.transpose() * w.asDiagonal() * M;
}

namespace {

/// (1 +- tol)-multiplicative leverage scores of M. The sketch route builds a
/// tol/2-accurate spectral sketch and answers direct generalized-score
/// queries against it; at small n the sketch shortcut makes this exact.
Vector estimated_scores(const Matrix& M, double tol, LeverageEstimator::Mode mode,
                        Rng& rng, CostLedger& ledger, std::string_view label) {
  ledger.add_classical(label, static_cast<std::uint64_t>(M.rows()));
  HalvingOptions opts;
  opts.score_mode = mode;
  opts.modeled_kind = std::nullopt;
  CostLedger scratch;
  SpectralSketch sk =
      repeated_halving(RowOracle::dense(M), std::min(1.0, tol / 2.0),
                       rng.stream("score_sketch", rng.bits()), scratch, "scores", opts);
  LeverageEstimator est = LeverageEstimator::direct(sk.rows);
  Vector out(M.rows());
  for (Index i = 0; i < M.rows(); ++i) {
    const double sig = est.query(M.row(i).transpose());
    out[i] = std::isinf(sig) ? 1.0 : std::min(sig, 1.0);
  }
  return out;
}

/// Weight vector at (1 +- tol) multiplicative accuracy for the sketched
/// oracles; Lewis goes through the certified fixed point.
Vector estimated_weights(const BarrierKind& kind, const LpInstance& inst,
                         const Matrix& M, double tol, Rng& rng, CostLedger& ledger,
                         const SketchOptions& opts, std::string_view label) {
  switch (kind.tag) {
    case BarrierKind::Tag::Log:
      return Vector::Ones(inst.n);
    case BarrierKind::Tag::Volumetric:
      return estimated_scores(M, tol, opts.score_mode, rng, ledger, label);
    case BarrierKind::Tag::Hybrid:
      return estimated_scores(M, tol, opts.score_mode, rng, ledger, label).array() +
             kind.hybrid_rho(inst.n, inst.d);
    case BarrierKind::Tag::Lewis: {
      const double alpha = 2.0 / (kind.p - 2.0);
      const double mu = tol * alpha * alpha /
                        (opts.lewis_kappa * std::sqrt(static_cast<double>(inst.d)));
      return lewis_weights_fixed_point(M, kind.p, mu, 2000, &ledger, label);
    }
  }
  throw std::logic_error("unknown barrier kind");
}

CostKind hessian_cost_kind(const BarrierKind& kind) {
  switch (kind.tag) {
    case BarrierKind::Tag::Log: return CostKind::HessianLog;
    case BarrierKind::Tag::Volumetric:
    case BarrierKind::Tag::Hybrid: return CostKind::HessianVol;
    case BarrierKind::Tag::Lewis: return CostKind::HessianLewis;
  }
  throw std::logic_error("unknown barrier kind");
}

CostKind gradient_cost_kind(const BarrierKind& kind) {
  switch (kind.tag) {
    case BarrierKind::Tag::Log: return CostKind::GradLog;
    case BarrierKind::Tag::Volumetric:
    case BarrierKind::Tag::Hybrid: return CostKind::GradVol;
    case BarrierKind::Tag::Lewis: return CostKind::GradLewis;
  }
  throw std::logic_error("unknown barrier kind");
}

}  // namespace

Matrix hessian_sketch(const BarrierKind& kind, const LpInstance& inst, const Vector& x,
                      double eps, Rng rng, CostLedger& ledger,
                      const SketchOptions& opts) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("hessian_sketch: eps in (0,1]");
  const Vector s = slacks(inst, x);
  const Matrix M = slack_scaled(inst, s);
  const std::string label = std::string("hessian_") + kind.name();
  ledger.add_modeled(label,
                     modeled_quantum_cost(hessian_cost_kind(kind),
                                          static_cast<double>(inst.n),
                                          static_cast<double>(inst.d), eps));

  // weight error and sketch error each get eps/3: (1-eps/3)^2 >= 1-eps
  const bool weighted = kind.tag != BarrierKind::Tag::Log;
  const double sketch_eps = weighted ? eps / 3.0 : eps;
  Matrix rows = M;
  if (weighted) {
    const Vector w = estimated_weights(kind, inst, M, eps / 3.0, rng, ledger, opts,
                                       label + "/weights");
    rows = w.cwiseSqrt().asDiagonal() * M;
  }
  HalvingOptions hopts;
  hopts.c_const = opts.c_const;
  hopts.score_mode = opts.score_mode;
  hopts.modeled_kind = std::nullopt;
  SpectralSketch sk = repeated_halving(RowOracle::dense(rows), sketch_eps,
                                       rng.stream("hessian"), ledger, label, hopts);
  return sk.gram();
}

Vector gradient_estimate(const BarrierKind& kind, const LpInstance& inst,
                         const Vector& x, double zeta, Rng rng, CostLedger& ledger,
                         const SketchOptions& opts) {
  if (!(zeta > 0.0) || zeta > 1.0) throw std::domain_error("gradient_estimate: zeta in (0,1]");
  const Vector s = slacks(inst, x);
  const Matrix M = slack_scaled(inst, s);
  const std::string label = std::string("gradient_") + kind.name();
  ledger.add_modeled(label,
                     modeled_quantum_cost(gradient_cost_kind(kind),
                                          static_cast<double>(inst.n),
                                          static_cast<double>(inst.d), zeta));

  const bool weighted = kind.tag != BarrierKind::Tag::Log;
  Vector w = Vector::Ones(inst.n);
  double mv_delta = zeta;
  if (weighted) {
    // multiplicative weight error delta_w contributes delta_w * ||v||_2
    // <= delta_w sqrt((1+delta_w) d); split the budget with the estimator
    const double delta_w = zeta / (opts.kappa_g * std::sqrt(static_cast<double>(inst.d)));
    w = estimated_weights(kind, inst, M, delta_w, rng, ledger, opts, label + "/weights");
    mv_delta = zeta / 2.0;
  }

  const Vector root_w = w.cwiseSqrt();
  const Matrix rows = root_w.asDiagonal() * M;
  MatVecRequest req;
  req.B = RowOracle::dense(rows, &ledger, label);
  req.v = [&root_w](Index i) { return root_w[i]; };
  req.v_inf_bound = root_w.maxCoeff();
  req.delta = mv_delta;
  req.failure_prob = opts.failure_prob;
  const Vector y = estimate_matvec(req, rng.stream("gradient"), ledger, label,
                                   nullptr, false);
  return -y;
}

double complexity(const BarrierKind& kind, Index n, Index d, double kappa_h) {
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  switch (kind.tag) {
    case BarrierKind::Tag::Log:
      return nn;
    case BarrierKind::Tag::Volumetric:
      return std::sqrt(nn) * dd;
    case BarrierKind::Tag::Hybrid:
      return kappa_h * std::sqrt(nn * dd);
    case BarrierKind::Tag::Lewis: {
      const double p = kind.p;
      const double vp = std::pow(p + 2.0, 1.5) * std::pow(nn, 1.0 / (p + 2.0)) +
                        4.0 * std::pow(std::max(p, 2.0), 2.5);
      return dd * vp * vp;
    }
  }
  throw std::logic_error("unknown barrier kind");
}

}  // namespace tallip
