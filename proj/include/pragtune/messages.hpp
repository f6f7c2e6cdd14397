#pragma once

#include <cstdint>
#include <string>

#include "pragtune/value.hpp"

namespace pragtune {

enum class Orientation { Performance, Resource };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// Router output: one optimization assignment for the specialists.
struct Task {
  int node_id = 0;
  Orientation orientation = Orientation::Performance;
  std::string rationale;
};

// Specialist output: a single directive value update.
struct Proposal {
  int node_id = 0;
  std::string param;
  Value old_value;
  Value new_value;
  std::string prediction;
  std::string specialist_id;

  friend bool operator==(const Proposal& a, const Proposal& b) {
    return a.node_id == b.node_id && a.param == b.param && a.new_value == b.new_value;
  }
};

enum class Judgment { Better, Worse, Neutral };

const char* to_string(Judgment j);
Judgment judgment_from_string(const std::string& s);

// Critic output for one parent/child edge.
struct Verdict {
  Judgment judgment = Judgment::Neutral;
  bool prune = false;
  std::string message;
};

struct TokenUsage {
  std::string role;  // router | specialist | arbitrator | critic
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

}  // namespace pragtune
