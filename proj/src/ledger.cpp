#include "tallip/ledger.hpp"

#include <nlohmann/json.hpp>

namespace tallip {

CostLedger::Cell& CostLedger::cell(std::string_view label) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cells_.find(label);
  if (it == cells_.end()) {
    it = cells_.emplace(std::string(label), std::make_unique<Cell>()).first;
  }
  return *it->second;
}

const CostLedger::Cell* CostLedger::find(std::string_view label) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cells_.find(label);
  return it == cells_.end() ? nullptr : it->second.get();
}

void CostLedger::add_classical(std::string_view label, std::uint64_t queries) {
  cell(label).classical.fetch_add(queries, std::memory_order_relaxed);
}

void CostLedger::add_modeled(std::string_view label, double queries) {
  cell(label).modeled.fetch_add(queries, std::memory_order_relaxed);
}

void CostLedger::add_wall(std::string_view label, double seconds) {
  cell(label).wall.fetch_add(seconds, std::memory_order_relaxed);
}

std::uint64_t CostLedger::classical(std::string_view label) const {
  const Cell* c = find(label);
  return c ? c->classical.load(std::memory_order_relaxed) : 0;
}

double CostLedger::modeled(std::string_view label) const {
  const Cell* c = find(label);
  return c ? c->modeled.load(std::memory_order_relaxed) : 0.0;
}

std::uint64_t CostLedger::classical_with_prefix(std::string_view prefix) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::uint64_t total = 0;
  for (const auto& [name, c] : cells_) {
    if (name.size() >= prefix.size() &&
        std::string_view(name).substr(0, prefix.size()) == prefix) {
      total += c->classical.load(std::memory_order_relaxed);
    }
  }
  return total;
}

std::map<std::string, CostLedger::Entry> CostLedger::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::map<std::string, Entry> out;
  for (const auto& [name, c] : cells_) {
    out[name] = Entry{c->classical.load(std::memory_order_relaxed),
                      c->modeled.load(std::memory_order_relaxed),
                      c->wall.load(std::memory_order_relaxed)};
  }
  return out;
}

nlohmann::json CostLedger::to_json(bool include_wall) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, e] : snapshot()) {
    nlohmann::json entry = {
        {"classical_row_queries", e.classical_row_queries},
        {"modeled_quantum_row_queries", e.modeled_quantum_row_queries}};
    if (include_wall) entry["wall_seconds"] = e.wall_seconds;
    j[name] = std::move(entry);
  }
  return j;
}

}  // namespace tallip
