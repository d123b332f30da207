#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tallip/barrier.hpp"
#include "tallip/oracle.hpp"

namespace tallip {

struct RunConfig {
  enum class Command { Solve, Sketch, Lewis, Bench };
  Command command = Command::Solve;
  std::string input;
  std::string barrier = "log";  // log | volumetric | hybrid | lewis
  double epsilon = 1e-2;
  double p = 4.0;
  std::uint64_t seed = 1;
  bool sketched = true;  // mode: exact | sketched
  std::string trace_path;
  std::string report_path;
  int threads = 1;
  std::vector<Index> grid_n;  // bench only
  std::vector<Index> grid_d;
};

// exit codes: 0 success, 1 I/O, usage or infeasibility, 2 non-convergence
int run_solve(const RunConfig& cfg);
int run_sketch(const RunConfig& cfg);
int run_lewis(const RunConfig& cfg);
int run_bench(const RunConfig& cfg);
int run(const RunConfig& cfg);

BarrierKind parse_barrier(const std::string& name, double p, Index n);

}  // namespace tallip
