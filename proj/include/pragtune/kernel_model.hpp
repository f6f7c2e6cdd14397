#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace pragtune {

// On-chip array touched by loop bodies.
struct ArraySpec {
  std::int64_t size = 0;  // elements
  int ports = 1;
};

// One loop of the nest. body_cost and body_dsp are per-iteration figures,
// exclusive of child loops.
struct LoopNode {
  std::string id;
  std::int64_t trip_count = 1;
  std::int64_t body_cost = 0;
  std::int64_t body_dsp = 0;
  std::vector<std::string> accesses;
  std::vector<LoopNode> children;
};

// Loop-nest model consumed by the surrogate evaluator. A forest of root
// loops executed back to back.
struct KernelModel {
  std::vector<LoopNode> loops;
  std::map<std::string, ArraySpec> arrays;

  // Depth of the loop with the given id (roots at 0), or -1 when absent.
  int loop_depth(const std::string& id) const;
  bool has_loop(const std::string& id) const;

  static KernelModel from_json(const nlohmann::json& j);
  static KernelModel load(const std::string& path);
};

}  // namespace pragtune
