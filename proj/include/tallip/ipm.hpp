#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tallip/barrier.hpp"
#include "tallip/errors.hpp"
#include "tallip/ledger.hpp"
#include "tallip/oracle.hpp"
#include "tallip/rng.hpp"

namespace tallip {

/// Short-step parameters. Construction enforces the admissibility constraint
/// (alpha + zeta) beta + (beta - 1) sqrt(theta) <= 1/4.
struct NewtonParams {
  double alpha = 1.0 / 32.0;  // step-quality threshold
  double zeta = 1.0 / 32.0;   // gradient accuracy budget
  double C = 1.0;             // Hessian approximation factor, Q <= H <= C Q
  double beta = 0.0;          // eta growth 1 + 1/(8 sqrt(theta))
  double step_delta = 0.0;    // damping 1/(4C)
  double theta = 0.0;         // barrier complexity driving the schedule
  Index max_inner = 0;        // inner-loop cap, 64 C^2
  Index max_centering = 20000;

  static NewtonParams make(double theta, double C, double zeta,
                           double alpha = 1.0 / 32.0);
};

/// theta wired into the schedule per barrier. Log/Volumetric/Hybrid use
/// complexity() directly. Lewis uses the leading-order v_p (the additive
/// 4 p^{2.5} term is a worst-case constant that would inflate desk-scale
/// iteration counts ~50x); complexity() still reports the full formula.
double ipm_theta(const BarrierKind& kind, Index n, Index d);

struct NewtonStep {
  Vector direction;  // -Q^{-1} g
  double norm_Q = 0.0;
};

/// d = -Q^{-1} g via Cholesky; norm_Q = sqrt(d' Q d).
NewtonStep approx_newton_step(const Matrix& Q, const Vector& g);

/// Gradient/Hessian/value access used by the driver; exact or sketched.
struct BarrierOracles {
  std::function<Matrix(const Vector&)> hessian;   // Q(x)
  std::function<Vector(const Vector&)> gradient;  // g~ of the pure barrier
  std::function<double(const Vector&)> value;     // diagnostic only
  double C = 1.0;
  double zeta = 0.0;
};

BarrierOracles make_exact_oracles(const BarrierKind& kind, const LpInstance& inst);

struct SketchedOracleOptions {
  double hessian_eps = 0.25;
  double zeta = 1.0 / 32.0;
  SketchOptions sketch;
};

/// Fresh sketches and gradient estimates on every call; randomness flows
/// through per-call named substreams of the given root stream.
BarrierOracles make_sketched_oracles(const BarrierKind& kind, const LpInstance& inst,
                                     Rng root, CostLedger& ledger,
                                     const SketchedOracleOptions& opts = {});

struct TraceRecord {
  Index outer = 0;
  Index inner = 0;
  double eta = 0.0;
  double step_norm_Q = 0.0;
  double barrier_value = 0.0;
  double objective = 0.0;
  double min_slack = 0.0;
};

struct IpmTrace {
  std::vector<TraceRecord> records;  // one per Newton-step evaluation
  double eta0 = 0.0;
  double theta = 0.0;
  Index outer_iterations = 0;
  Index inner_iterations = 0;  // accepted damped steps
  Index centering_iterations = 0;
  Index outer_bound = 0;  // ceil(log(2 theta/(eps eta0)) / log beta)
};

/// Per-accepted-step detail captured when a descent probe is attached.
struct DescentRecord {
  Index outer = 0;
  double norm_Q = 0.0;
  double norm_x = 0.0;  // ||d~||_x in the probe's dense Hessian
  double f_before = 0.0;
  double f_after = 0.0;
  double delta = 0.0;
  bool precondition_ok = false;  // zeta <= ||d~||_x / C and delta ||d~||_x <= 1/2
};

/// Instrumentation for the descent lemma: dense Hessian and exact f values
/// are recomputed at every accepted inner step (test builds only).
struct DescentProbe {
  std::function<Matrix(const Vector&)> dense_hessian;
  std::function<double(const Vector&)> value;  // pure barrier value
  std::vector<DescentRecord>* out = nullptr;
};

/// Damped Newton on the pure barrier until ||d~||_Q <= alpha/2, then
/// eta0 = alpha / (2 ||c||_{Q^{-1}} (1 + zeta)) so the first short step
/// satisfies the entry invariant.
BarrierState initial_centering(const LpInstance& inst, const BarrierKind& kind,
                               const NewtonParams& params, const BarrierOracles& oracles,
                               IpmTrace* trace = nullptr);

/// One path-following iteration: eta' = beta eta, then damped approximate
/// Newton steps on f_eta' until ||d~||_Q < alpha.
BarrierState short_step_iteration(const BarrierState& state, const LpInstance& inst,
                                  const NewtonParams& params,
                                  const BarrierOracles& oracles, IpmTrace* trace = nullptr,
                                  const DescentProbe* probe = nullptr);

struct PathFollowResult {
  Vector x;
  IpmTrace trace;
};

/// Full solve: center, then short steps until eta >= 2 theta / eps.
PathFollowResult path_follow(const LpInstance& inst, const BarrierKind& kind,
                             double eps, const NewtonParams& params,
                             const BarrierOracles& oracles,
                             const DescentProbe* probe = nullptr,
                             const std::string& trace_path = {},
                             CostLedger* ledger = nullptr);

}  // namespace tallip
