#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace tallip {

/// Per-label accounting of measured classical row queries next to modeled
/// quantum query counts. Counters are atomic so concurrent readers of the
/// data structures they instrument can share one ledger.
class CostLedger {
 public:
  CostLedger() = default;

  void add_classical(std::string_view label, std::uint64_t queries = 1);
  void add_modeled(std::string_view label, double queries);
  void add_wall(std::string_view label, double seconds);

  struct Entry {
    std::uint64_t classical_row_queries = 0;
    double modeled_quantum_row_queries = 0.0;
    double wall_seconds = 0.0;
  };

  std::uint64_t classical(std::string_view label) const;
  double modeled(std::string_view label) const;
  /// Sum of classical counters over all labels starting with `prefix`.
  std::uint64_t classical_with_prefix(std::string_view prefix) const;

  std::map<std::string, Entry> snapshot() const;
  /// Wall times are excluded by default so reports stay run-to-run identical.
  nlohmann::json to_json(bool include_wall = false) const;

 private:
  struct Cell {
    std::atomic<std::uint64_t> classical{0};
    std::atomic<double> modeled{0.0};
    std::atomic<double> wall{0.0};
  };
  Cell& cell(std::string_view label);
  const Cell* find(std::string_view label) const;

  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Cell>, std::less<>> cells_;
};

/// Accumulates elapsed time into a ledger label on destruction.
class ScopedWallTimer {
 public:
  ScopedWallTimer(CostLedger& ledger, std::string label)
      : ledger_(ledger), label_(std::move(label)),
        start_(std::chrono::steady_clock::now()) {}
  ~ScopedWallTimer() {
    const auto end = std::chrono::steady_clock::now();
    ledger_.add_wall(label_, std::chrono::duration<double>(end - start_).count());
  }
  ScopedWallTimer(const ScopedWallTimer&) = delete;
  ScopedWallTimer& operator=(const ScopedWallTimer&) = delete;

 private:
  CostLedger& ledger_;
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace tallip
