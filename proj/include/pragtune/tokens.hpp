#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace pragtune {

// Per-role and per-iteration token totals accumulated from a run log.
struct TokenReport {
  struct RoleTotals {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t total() const { return input_tokens + output_tokens; }
  };

  std::map<std::string, RoleTotals> per_role;   // every agent role, even if zero
  std::map<int, std::int64_t> per_iteration;    // iteration -> total tokens
  std::int64_t run_total = 0;

  // role -> share of run_total; empty when the run consumed no tokens.
  std::map<std::string, double> ratios() const;

  nlohmann::json to_json() const;
  std::string render_table() const;
};

TokenReport account_tokens(const std::vector<nlohmann::json>& log_records);

}  // namespace pragtune
