#include "tallip/cli.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tallip/io.hpp"
#include "tallip/ipm.hpp"
#include "tallip/ledger.hpp"
#include "tallip/lewis.hpp"
#include "tallip/matvec.hpp"
#include "tallip/rng.hpp"
#include "tallip/sketch.hpp"

namespace tallip {

namespace {

void emit(const RunConfig& cfg, const nlohmann::json& j) {
  if (cfg.report_path.empty()) {
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    write_json(j, cfg.report_path);
  }
}

int fail(const char* what, const std::string& detail) {
  std::fprintf(stderr, "error (%s): %s\n", what, detail.c_str());
  return 1;
}

}  // namespace

BarrierKind parse_barrier(const std::string& name, double p, Index n) {
  if (name == "log") return BarrierKind::log_barrier();
  if (name == "volumetric") return BarrierKind::volumetric();
  if (name == "hybrid") return BarrierKind::hybrid();
  if (name == "lewis") {
    if (p <= 0.0) return BarrierKind::lewis_default(n);
    if (p < 4.0) throw std::domain_error("lewis barrier requires p >= 4");
    return BarrierKind::lewis(p);
  }
  throw std::domain_error("unknown barrier: " + name);
}

int run_solve(const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) return fail("usage", "epsilon must be positive");
  LpInstance inst;
  try {
    inst = read_lp(cfg.input);
  } catch (const std::exception& e) {
    return fail("input", e.what());
  }
  try {
    if (!inst.x0)
      throw std::invalid_argument("instance carries no strictly interior x0");
    const BarrierKind kind = parse_barrier(cfg.barrier, cfg.p, inst.n);
    const double theta = ipm_theta(kind, inst.n, inst.d);
    CostLedger ledger;
    Rng root(cfg.seed);

    BarrierOracles oracles;
    NewtonParams params{};
    if (cfg.sketched) {
      SketchedOracleOptions opts;
      // budget the per-call failure probability across the whole run
      const double beta = 1.0 + 1.0 / (8.0 * std::sqrt(theta));
      const double expected_calls =
          8.0 * (std::ceil(std::log(2.0 * theta / (cfg.epsilon * 1e-4)) /
                           std::log(beta)) +
                 200.0);
      opts.sketch.failure_prob = 1.0 / (100.0 * std::max(1.0, expected_calls));
      oracles = make_sketched_oracles(kind, inst, root.stream("oracles"), ledger, opts);
      params = NewtonParams::make(theta, oracles.C, oracles.zeta);
    } else {
      oracles = make_exact_oracles(kind, inst);
      params = NewtonParams::make(theta, oracles.C, 0.0);
    }

    const PathFollowResult res =
        path_follow(inst, kind, cfg.epsilon, params, oracles, nullptr,
                    cfg.trace_path, &ledger);
    const Vector s = slacks(inst, res.x);

    nlohmann::json j;
    j["x"] = std::vector<double>(res.x.data(), res.x.data() + res.x.size());
    j["objective"] = inst.c.dot(res.x);
    j["min_slack"] = s.minCoeff();
    j["outer_iters"] = res.trace.outer_iterations;
    j["inner_iters"] = res.trace.inner_iterations;
    j["eta_final"] =
        res.trace.eta0 *
        std::pow(params.beta, static_cast<double>(res.trace.outer_iterations));
    j["theta"] = theta;
    j["barrier"] = cfg.barrier;
    j["mode"] = cfg.sketched ? "sketched" : "exact";
    j["seed"] = cfg.seed;
    j["ledger"] = ledger.to_json();
    emit(cfg, j);
    return 0;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "non-convergence: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    return fail("solve", e.what());
  }
}

int run_sketch(const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || cfg.epsilon > 1.0)
    return fail("usage", "sketch requires epsilon in (0,1]");
  try {
    const LpInstance inst = read_lp(cfg.input);
    CostLedger ledger;
    SpectralSketch sk =
        repeated_halving(RowOracle::dense(inst.A), cfg.epsilon,
                         Rng(cfg.seed).stream("sketch"), ledger, "spectral_approx");
    // measured sandwich: extreme eigenvalues of the whitened gram
    const Matrix G = inst.A.transpose() * inst.A;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sk.gram());
    Vector w = eig.eigenvalues();
    for (Index i = 0; i < w.size(); ++i)
      if (!(w[i] > 0.0)) throw RankDeficient("sketch gram is singular");
    const Matrix inv_root = eig.eigenvectors() *
                            w.cwiseSqrt().cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(
                          inv_root * G * inv_root).eigenvalues();

    nlohmann::json j;
    j["sketch"] = sk.to_json();
    j["rows"] = sk.row_count();
    j["eigen_min"] = ev.minCoeff();
    j["eigen_max"] = ev.maxCoeff();
    j["ledger"] = ledger.to_json();
    emit(cfg, j);
    return 0;
  } catch (const std::exception& e) {
    return fail("sketch", e.what());
  }
}

int run_lewis(const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
    return fail("usage", "lewis requires epsilon in (0,1)");
  try {
    const LpInstance inst = read_lp(cfg.input);
    CostLedger ledger;
    const LewisParams params =
        LewisParams::make(cfg.p, cfg.epsilon, inst.n, inst.d);
    const LewisResult res = fp_lewis_weights(inst.A, params, ScoreEstimation::Exact,
                                             Rng(cfg.seed).stream("lewis"), ledger);
    nlohmann::json j = res.to_json();
    j["ledger"] = ledger.to_json();
    emit(cfg, j);
    return 0;
  } catch (const std::exception& e) {
    return fail("lewis", e.what());
  }
}

int run_bench(const RunConfig& cfg) {
  if (cfg.grid_n.empty() || cfg.grid_d.empty())
    return fail("usage", "bench requires nonempty --grid-n and --grid-d");
  if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
    return fail("usage", "bench requires epsilon in (0,1)");
  try {
    nlohmann::json rows = nlohmann::json::array();
    for (Index d : cfg.grid_d) {
      for (Index n : cfg.grid_n) {
        if (n < 2 * d) continue;
        const LpInstance inst = gen_random_tall_lp(n, d, cfg.seed);
        Rng rng = Rng(cfg.seed).stream("bench", static_cast<std::uint64_t>(n * 131 + d));
        const double nn = static_cast<double>(n);
        const double dd = static_cast<double>(d);

        {  // spectral approximation
          CostLedger ledger;
          repeated_halving(RowOracle::dense(inst.A), cfg.epsilon, rng.stream("sk"),
                           ledger, "spectral_approx");
          rows.push_back({{"n", n},
                          {"d", d},
                          {"subroutine", "spectral_approx"},
                          {"classical_row_queries", ledger.classical("spectral_approx")},
                          {"modeled_quantum_row_queries",
                           modeled_quantum_cost(CostKind::SpectralApprox, nn, dd,
                                                cfg.epsilon)}});
        }
        {  // log-barrier gradient estimate at the interior point
          CostLedger ledger;
          gradient_estimate(BarrierKind::log_barrier(), inst, *inst.x0, cfg.epsilon,
                            rng.stream("grad"), ledger);
          rows.push_back({{"n", n},
                          {"d", d},
                          {"subroutine", "gradient_log"},
                          {"classical_row_queries",
                           ledger.classical_with_prefix("gradient_log")},
                          {"modeled_quantum_row_queries",
                           modeled_quantum_cost(CostKind::GradLog, nn, dd,
                                                cfg.epsilon)}});
        }
        {  // fixed-point Lewis weights
          CostLedger ledger;
          const LewisParams params = LewisParams::make(std::max(4.0, cfg.p),
                                                       cfg.epsilon, n, d);
          fp_lewis_weights(inst.A, params, ScoreEstimation::Exact,
                           rng.stream("lewis"), ledger);
          rows.push_back({{"n", n},
                          {"d", d},
                          {"subroutine", "lewis_weights"},
                          {"classical_row_queries", ledger.classical("lewis")},
                          {"modeled_quantum_row_queries",
                           modeled_quantum_cost(CostKind::LewisWeights, nn, dd,
                                                cfg.epsilon)}});
        }
      }
    }
    if (rows.empty()) return fail("usage", "bench grid produced no feasible (n,d) pairs");
    nlohmann::json j;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["rows"] = rows;
    emit(cfg, j);
    return 0;
  } catch (const std::exception& e) {
    return fail("bench", e.what());
  }
}

int run(const RunConfig& cfg) {
  Eigen::setNbThreads(cfg.threads > 0 ? cfg.threads : 1);
  switch (cfg.command) {
    case RunConfig::Command::Solve: return run_solve(cfg);
    case RunConfig::Command::Sketch: return run_sketch(cfg);
    case RunConfig::Command::Lewis: return run_lewis(cfg);
    case RunConfig::Command::Bench: return run_bench(cfg);
  }
  return 1;
}

}  // namespace tallip
