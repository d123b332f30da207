#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tallip/barrier.hpp"
#include "tallip/cli.hpp"
#include "tallip/io.hpp"
#include "tallip/ipm.hpp"
#include "tallip/ledger.hpp"
#include "tallip/lewis.hpp"
#include "tallip/matvec.hpp"
#include "tallip/oracle.hpp"
#include "tallip/sketch.hpp"

namespace py = pybind11;
using namespace tallip;

namespace {

LpInstance make_instance(const Matrix& A, const Vector& b, const Vector& c,
                         std::optional<Vector> x0) {
  LpInstance inst;
  inst.n = A.rows();
  inst.d = A.cols();
  inst.A = A;
  inst.b = b;
  inst.c = c;
  inst.x0 = std::move(x0);
  inst.validate();
  return inst;
}

py::dict ledger_dict(const CostLedger& ledger) {
  py::dict out;
  for (const auto& [label, e] : ledger.snapshot()) {
    py::dict row;
    row["classical_row_queries"] = e.classical_row_queries;
    row["modeled_quantum_row_queries"] = e.modeled_quantum_row_queries;
    out[py::str(label)] = row;
  }
  return out;
}

py::dict solve_lp(const LpInstance& inst, const std::string& barrier, double eps,
                  bool sketched, std::uint64_t seed, double p) {
  const BarrierKind kind = parse_barrier(barrier, p, inst.n);
  const double theta = ipm_theta(kind, inst.n, inst.d);
  CostLedger ledger;
  BarrierOracles oracles;
  NewtonParams params{};
  if (sketched) {
    SketchedOracleOptions opts;
    oracles = make_sketched_oracles(kind, inst, Rng(seed).stream("oracles"), ledger, opts);
    params = NewtonParams::make(theta, oracles.C, oracles.zeta);
  } else {
    oracles = make_exact_oracles(kind, inst);
    params = NewtonParams::make(theta, oracles.C, 0.0);
  }
  const PathFollowResult res = path_follow(inst, kind, eps, params, oracles);
  py::dict out;
  out["x"] = res.x;
  out["objective"] = inst.c.dot(res.x);
  out["min_slack"] = slacks(inst, res.x).minCoeff();
  out["outer_iters"] = res.trace.outer_iterations;
  out["inner_iters"] = res.trace.inner_iterations;
  out["eta0"] = res.trace.eta0;
  out["theta"] = theta;
  out["ledger"] = ledger_dict(ledger);
  return out;
}

}  // namespace

PYBIND11_MODULE(_tallip, m) {
  m.doc() = "Tall-LP interior point solver with sketched Newton oracles";

  py::register_exception<InfeasibleInterior>(m, "InfeasibleInteriorError");
  py::register_exception<NonConvergence>(m, "NonConvergenceError");
  py::register_exception<RankDeficient>(m, "RankDeficientError");

  py::class_<LpInstance>(m, "LpInstance")
      .def(py::init(&make_instance), py::arg("A"), py::arg("b"), py::arg("c"),
           py::arg("x0") = std::nullopt)
      .def_readonly("n", &LpInstance::n)
      .def_readonly("d", &LpInstance::d)
      .def_readonly("A", &LpInstance::A)
      .def_readonly("b", &LpInstance::b)
      .def_readonly("c", &LpInstance::c)
      .def_property_readonly(
          "x0", [](const LpInstance& i) { return i.x0 ? py::cast(*i.x0) : py::none(); })
      .def("row_sparsity", &LpInstance::row_sparsity);

  m.def("generate_tall_lp", &gen_random_tall_lp, py::arg("n"), py::arg("d"),
        py::arg("seed"));
  m.def("load_lp", &read_lp, py::arg("path"));
  m.def("leverage_scores", &leverage_scores_exact, py::arg("A"));

  m.def(
      "spectral_sketch",
      [](const Matrix& A, double eps, std::uint64_t seed) {
        CostLedger ledger;
        SpectralSketch sk = repeated_halving(RowOracle::dense(A), eps,
                                             Rng(seed).stream("sketch"), ledger,
                                             "spectral_approx");
        py::dict out;
        out["rows"] = sk.rows;
        out["source_indices"] = sk.source_indices;
        out["scales"] = sk.scales;
        out["epsilon"] = sk.epsilon;
        out["classical_row_queries"] = ledger.classical("spectral_approx");
        out["modeled_quantum_row_queries"] = ledger.modeled("spectral_approx");
        return out;
      },
      py::arg("A"), py::arg("eps"), py::arg("seed") = 1);

  m.def(
      "lewis_weights",
      [](const Matrix& A, double p, double eps, std::uint64_t seed) {
        CostLedger ledger;
        const LewisParams params = LewisParams::make(p, eps, A.rows(), A.cols());
        const LewisResult res = fp_lewis_weights(A, params, ScoreEstimation::Exact,
                                                 Rng(seed).stream("lewis"), ledger);
        py::dict out;
        out["weights"] = res.weights;
        out["fp_residual"] = res.fp_residual;
        out["iterations"] = res.params.iterations;
        return out;
      },
      py::arg("A"), py::arg("p") = 4.0, py::arg("eps") = 0.1, py::arg("seed") = 1);

  m.def(
      "estimate_matvec",
      [](const Matrix& B, const Vector& v, double delta, double failure_prob,
         std::uint64_t seed) {
        CostLedger ledger;
        MatVecRequest req;
        req.B = RowOracle::dense(B);
        req.v = [&v](Index i) { return v[i]; };
        req.v_inf_bound = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
        if (req.v_inf_bound == 0.0) req.v_inf_bound = 1.0;
        req.delta = delta;
        req.failure_prob = failure_prob;
        return Vector(estimate_matvec(req, Rng(seed).stream("matvec"), ledger));
      },
      py::arg("B"), py::arg("v"), py::arg("delta") = 0.1,
      py::arg("failure_prob") = 0.01, py::arg("seed") = 1);

  m.def("barrier_value",
        [](const LpInstance& inst, const Vector& x, const std::string& barrier,
           double p) {
          return barrier_value(parse_barrier(barrier, p, inst.n), inst, x);
        },
        py::arg("instance"), py::arg("x"), py::arg("barrier") = "log",
        py::arg("p") = 4.0);
  m.def("barrier_gradient",
        [](const LpInstance& inst, const Vector& x, const std::string& barrier,
           double p) {
          return gradient_exact(parse_barrier(barrier, p, inst.n), inst, x);
        },
        py::arg("instance"), py::arg("x"), py::arg("barrier") = "log",
        py::arg("p") = 4.0);

  m.def("modeled_quantum_cost",
        [](const std::string& kind, double n, double d, double eps) {
          static const std::map<std::string, CostKind> kinds = {
              {"spectral_approx", CostKind::SpectralApprox},
              {"leverage_scores", CostKind::LeverageScores},
              {"lewis_weights", CostKind::LewisWeights},
              {"matvec", CostKind::MatVec},
              {"hessian_log", CostKind::HessianLog},
              {"hessian_vol", CostKind::HessianVol},
              {"hessian_lewis", CostKind::HessianLewis},
              {"gradient_log", CostKind::GradLog},
              {"gradient_vol", CostKind::GradVol},
              {"gradient_lewis", CostKind::GradLewis},
          };
          auto it = kinds.find(kind);
          if (it == kinds.end()) throw std::domain_error("unknown cost kind: " + kind);
          return modeled_quantum_cost(it->second, n, d, eps);
        },
        py::arg("kind"), py::arg("n"), py::arg("d"), py::arg("eps"));

  m.def("solve", &solve_lp, py::arg("instance"), py::arg("barrier") = "log",
        py::arg("eps") = 1e-2, py::arg("sketched") = true, py::arg("seed") = 1,
        py::arg("p") = 0.0);
}
