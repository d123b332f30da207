#include "tallip/ipm.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace tallip {

NewtonParams NewtonParams::make(double theta, double C, double zeta, double alpha) {
  if (!(theta >= 1.0)) throw std::invalid_argument("NewtonParams: theta >= 1 required");
  if (!(C >= 1.0)) throw std::invalid_argument("NewtonParams: C >= 1 required");
  if (zeta < 0.0 || alpha <= 0.0) throw std::invalid_argument("NewtonParams: bad alpha/zeta");
  NewtonParams p;
  p.alpha = alpha;
  p.zeta = zeta;
  p.C = C;
  p.theta = theta;
  p.beta = 1.0 + 1.0 / (8.0 * std::sqrt(theta));
  p.step_delta = 1.0 / (4.0 * C);
  p.max_inner = static_cast<Index>(std::ceil(64.0 * C * C));
  const double admissible = (alpha + zeta) * p.beta + (p.beta - 1.0) * std::sqrt(theta);
  if (admissible > 0.25 + 1e-12)
    throw std::invalid_argument("NewtonParams: (alpha+zeta)beta + (beta-1)sqrt(theta) > 1/4");
  return p;
}

double ipm_theta(const BarrierKind& kind, Index n, Index d) {
  if (kind.tag != BarrierKind::Tag::Lewis) return complexity(kind, n, d);
  const double p = kind.p;
  const double vp = std::pow(p + 2.0, 1.5) *
                    std::pow(static_cast<double>(n), 1.0 / (p + 2.0));
  return static_cast<double>(d) * vp * vp;
}

NewtonStep approx_newton_step(const Matrix& Q, const Vector& g) {
  Eigen::LLT<Matrix> llt(Q);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("approx_newton_step: Q is not positive definite");
  NewtonStep step;
  step.direction = llt.solve(-g);
  step.norm_Q = std::sqrt(std::max(0.0, step.direction.dot(-g)));
  return step;
}

BarrierOracles make_exact_oracles(const BarrierKind& kind, const LpInstance& inst) {
  BarrierOracles o;
  o.zeta = 0.0;
  switch (kind.tag) {
    case BarrierKind::Tag::Log: o.C = 1.0; break;
    case BarrierKind::Tag::Volumetric:
    case BarrierKind::Tag::Hybrid: o.C = 5.0; break;
    case BarrierKind::Tag::Lewis: o.C = 1.0 + kind.p; break;
  }
  const bool lewis = kind.tag == BarrierKind::Tag::Lewis;
  // Lewis values/gradients follow the half-log-det convention, so the
  // surrogate is halved to keep Q below the true Hessian.
  const double qscale = lewis ? 0.5 : 1.0;
  o.hessian = [kind, &inst, qscale](const Vector& x) {
    return Matrix(qscale * hessian_surrogate_exact(kind, inst, x));
  };
  o.gradient = [kind, &inst](const Vector& x) { return gradient_exact(kind, inst, x); };
  o.value = [kind, &inst](const Vector& x) { return barrier_value(kind, inst, x); };
  return o;
}

BarrierOracles make_sketched_oracles(const BarrierKind& kind, const LpInstance& inst,
                                     Rng root, CostLedger& ledger,
                                     const SketchedOracleOptions& opts) {
  BarrierOracles o;
  o.zeta = opts.zeta;
  const double eh = opts.hessian_eps;
  const double sandwich = kind.tag == BarrierKind::Tag::Log ? 1.0
                          : kind.tag == BarrierKind::Tag::Lewis ? 1.0 + kind.p
                                                                : 5.0;
  o.C = sandwich * (1.0 + eh) / (1.0 - eh);
  const double qscale =
      (kind.tag == BarrierKind::Tag::Lewis ? 0.5 : 1.0) * (1.0 - eh);

  auto counter = std::make_shared<std::uint64_t>(0);
  o.hessian = [kind, &inst, &ledger, root, opts, qscale, counter](const Vector& x) {
    Rng rng = root.stream("hessian", (*counter)++);
    return Matrix(qscale *
                  hessian_sketch(kind, inst, x, opts.hessian_eps, rng, ledger,
                                 opts.sketch));
  };
  o.gradient = [kind, &inst, &ledger, root, opts, counter](const Vector& x) {
    Rng rng = root.stream("gradient", (*counter)++);
    return gradient_estimate(kind, inst, x, opts.zeta, rng, ledger, opts.sketch);
  };
  // diagnostic value uses the exact formulas (cheap at these sizes)
  o.value = [kind, &inst](const Vector& x) { return barrier_value(kind, inst, x); };
  return o;
}

namespace {

struct TraceSink {
  IpmTrace* trace = nullptr;
  std::ofstream file;
  CostLedger* ledger = nullptr;
  bool enabled = false;

  void open(const std::string& path, CostLedger* lg) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw SolverError("cannot open trace path: " + path);
    ledger = lg;
    enabled = true;
  }
  void emit(const TraceRecord& r) {
    if (trace) trace->records.push_back(r);
    if (!enabled) return;
    nlohmann::json j = {{"outer", r.outer},       {"inner", r.inner},
                        {"eta", r.eta},           {"step_norm_Q", r.step_norm_Q},
                        {"barrier_value", r.barrier_value},
                        {"objective", r.objective},
                        {"min_slack", r.min_slack}};
    if (ledger) j["ledger"] = ledger->to_json();
    file << j.dump() << '\n';
  }
};

TraceRecord make_record(Index outer, Index inner, double eta, double norm,
                        const LpInstance& inst, const BarrierOracles& oracles,
                        const Vector& x, const Vector& s) {
  TraceRecord r;
  r.outer = outer;
  r.inner = inner;
  r.eta = eta;
  r.step_norm_Q = norm;
  r.barrier_value = oracles.value(x);
  r.objective = inst.c.dot(x);
  r.min_slack = s.minCoeff();
  return r;
}

/// Inner loop shared by centering (eta = 0) and the short step.
/// Returns the number of accepted damped steps.
Index damped_newton(Vector& x, Vector& s, double eta, double threshold,
                    const LpInstance& inst, const NewtonParams& params,
                    const BarrierOracles& oracles, Index cap, bool adaptive_damping,
                    Index outer, TraceSink* sink, const DescentProbe* probe,
                    Matrix* last_Q) {
  Index accepted = 0;
  for (Index it = 0;; ++it) {
    const Matrix Q = oracles.hessian(x);
    const Vector g = eta * inst.c + oracles.gradient(x);
    const NewtonStep step = approx_newton_step(Q, g);
    if (sink)
      sink->emit(make_record(outer, accepted, eta, step.norm_Q, inst, oracles, x, s));
    if (last_Q) *last_Q = Q;
    if (step.norm_Q < threshold) return accepted;
    if (it >= cap)
      throw NonConvergence("inner Newton loop exceeded its iteration cap");

    double delta = params.step_delta;
    if (adaptive_damping) delta = 1.0 / (4.0 * params.C * (1.0 + step.norm_Q));

    DescentRecord drec;
    const bool probing = probe && probe->out;
    if (probing) {
      drec.outer = outer;
      drec.norm_Q = step.norm_Q;
      const Matrix H = probe->dense_hessian(x);
      drec.norm_x = std::sqrt(std::max(0.0, step.direction.dot(H * step.direction)));
      drec.f_before = eta * inst.c.dot(x) + probe->value(x);
      drec.delta = delta;
      drec.precondition_ok = params.zeta <= drec.norm_x / params.C + 1e-15 &&
                             delta * drec.norm_x <= 0.5;
    }

    x += delta * step.direction;
    s = slacks(inst, x);  // throws if the step ever left the interior
    ++accepted;
    if (probing) {
      drec.f_after = eta * inst.c.dot(x) + probe->value(x);
      probe->out->push_back(drec);
    }
  }
}

}  // namespace

BarrierState initial_centering(const LpInstance& inst, const BarrierKind& kind,
                               const NewtonParams& params, const BarrierOracles& oracles,
                               IpmTrace* trace) {
  (void)kind;
  if (!inst.x0) throw std::invalid_argument("initial_centering: instance has no x0");
  BarrierState st;
  st.x = *inst.x0;
  st.s = slacks(inst, st.x);

  Matrix Q;
  const Index its = damped_newton(st.x, st.s, 0.0, params.alpha / 2.0, inst, params,
                                  oracles, params.max_centering, true, 0, nullptr,
                                  nullptr, &Q);
  if (trace) trace->centering_iterations = its;

  Eigen::LLT<Matrix> llt(Q);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("initial_centering: Q not positive definite");
  const double c_norm = std::sqrt(std::max(1e-300, inst.c.dot(llt.solve(inst.c))));
  st.eta = params.alpha / (2.0 * c_norm * (1.0 + params.zeta));
  return st;
}

BarrierState short_step_iteration(const BarrierState& state, const LpInstance& inst,
                                  const NewtonParams& params,
                                  const BarrierOracles& oracles, IpmTrace* trace,
                                  const DescentProbe* probe) {
  BarrierState next = state;
  next.eta = params.beta * state.eta;
  TraceSink sink;
  sink.trace = trace;
  const Index outer = trace ? ++trace->outer_iterations : 0;
  const Index inner = damped_newton(next.x, next.s, next.eta, params.alpha, inst,
                                    params, oracles, params.max_inner, false, outer,
                                    trace ? &sink : nullptr, probe, nullptr);
  if (trace) trace->inner_iterations += inner;
  return next;
}

PathFollowResult path_follow(const LpInstance& inst, const BarrierKind& kind,
                             double eps, const NewtonParams& params,
                             const BarrierOracles& oracles, const DescentProbe* probe,
                             const std::string& trace_path, CostLedger* ledger) {
  if (!(eps > 0.0)) throw std::domain_error("path_follow: eps > 0 required");
  PathFollowResult res;
  res.trace.theta = params.theta;

  TraceSink sink;
  sink.trace = &res.trace;
  sink.open(trace_path, ledger);

  BarrierState st = initial_centering(inst, kind, params, oracles, &res.trace);
  res.trace.eta0 = st.eta;
  const double eta_stop = 2.0 * params.theta / eps;
  res.trace.outer_bound = static_cast<Index>(
      std::ceil(std::log(eta_stop / st.eta) / std::log(params.beta)));

  while (st.eta < eta_stop) {
    const double eta_next = params.beta * st.eta;
    const Index outer = ++res.trace.outer_iterations;
    res.trace.inner_iterations += damped_newton(
        st.x, st.s, eta_next, params.alpha, inst, params, oracles, params.max_inner,
        false, outer, &sink, probe, nullptr);
    st.eta = eta_next;
  }
  res.x = st.x;
  return res;
}

}  // namespace tallip
