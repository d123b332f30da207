#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "tallip/oracle.hpp"

namespace tallip {

/// Reads an LP from either supported format, keyed on the file content:
///  - JSON object {"n", "d", "A" (row-major), "b", "c", "x0" optional}
///  - plain text: first line "n d", then n lines of d+1 reals (row, then
///    b_i), and a final line with the d entries of c.
LpInstance read_lp(const std::string& path);

LpInstance lp_from_json(const nlohmann::json& j);
nlohmann::json lp_to_json(const LpInstance& inst);

void write_lp_json(const LpInstance& inst, const std::string& path);
void write_lp_text(const LpInstance& inst, const std::string& path);

void write_json(const nlohmann::json& j, const std::string& path);

}  // namespace tallip
