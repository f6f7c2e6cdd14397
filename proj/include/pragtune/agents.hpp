#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pragtune/history.hpp"
#include "pragtune/messages.hpp"
#include "pragtune/prompts.hpp"
#include "pragtune/wire.hpp"

namespace pragtune {

inline const std::vector<std::string>& agent_roles() {
  static const std::vector<std::string> roles = {"router", "specialist", "arbitrator", "critic"};
  return roles;
}

struct AgentOptions {
  int batch_size = 2;
  double epsilon = 0.05;  // Neutral band for the critic
  int retries = 2;        // reasoner parse-failure retries before fallback
  std::string model = "gpt-4o";
  double temperature = 0.2;
};

// Critic messages and arbitration statistics fed back into prompts. Only the
// most recent messages are rendered, which keeps per-iteration context (and
// token usage) bounded.
struct Feedback {
  std::vector<std::string> messages;
  int rejected_count = 0;
  int rendered_tail = 8;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  std::string render() const;
};

struct BudgetState {
  int evals_used = 0;
  int evals_max = 1;

  double phase() const {
    return evals_max > 0 ? static_cast<double>(evals_used) / evals_max : 1.0;
  }
  bool late() const { return phase() > 0.75; }
};

// Emitted once per agent invocation so the explorer can log calls and token
// usage uniformly.
struct AgentCallReport {
  std::string role;
  std::string mode;  // scripted | llm
  bool fallback = false;
  int retries = 0;
  TokenUsage usage;
};

using AgentObserver = std::function<void(const AgentCallReport&)>;
using Predictor = std::function<EvalResult(const DesignPoint&)>;

// The four agent roles behind one engine. Each role runs either as a
// deterministic scripted policy or as a prompt-templated reasoner call with
// schema-validated output and scripted fallback.
class AgentEngine {
 public:
  AgentEngine(const DesignSpace& space, AgentOptions opts,
              std::map<std::string, std::string> role_modes, PromptLibrary prompts,
              std::shared_ptr<Transport> transport, Predictor predictor);

  void set_observer(AgentObserver obs) { observer_ = std::move(obs); }

  // Selects optimization tasks from the curated view.
  std::vector<Task> route(const ExplorationTree& tree,
                          const std::vector<const ExplorationNode*>& view, const Feedback& fb,
                          Orientation orientation);

  // One value update for `param` at the task's node. Throws FrozenParam when
  // no legal alternative exists.
  Proposal propose(const ExplorationTree& tree, const Task& task, const std::string& param,
                   const std::vector<const ExplorationNode*>& view, const Feedback& fb);

  // Dedupes, then selects at most batch_size proposals.
  std::vector<Proposal> arbitrate(const ExplorationTree& tree, std::vector<Proposal> proposals,
                                  const BudgetState& budget);

  // Judges a child against its one-parameter-different parent.
  Verdict criticize(const ExplorationNode& parent, const ExplorationNode& child);

  const AgentOptions& options() const { return opts_; }
  const std::string& role_mode(const std::string& role) const;

  // Structured reply of one reasoner exchange; exposed for tests.
  struct Reply {
    std::vector<std::pair<std::string, std::string>> fields;
    TokenUsage usage;
    bool fallback = false;
    int retries = 0;

    std::optional<std::string> first(const std::string& key) const;
  };

  // One request/response against the configured transport with up to
  // `retries` attempts; `validate` throws SchemaViolation to reject a reply.
  // Returns fallback=true after exhausting attempts.
  Reply call_reasoner(const std::string& role, const std::string& prompt,
                      const std::function<void(const Reply&)>& validate,
                      const std::function<std::string()>& fallback_content);

 private:
  struct ScriptedDecisions;

  bool llm(const std::string& role) const;
  void report(const AgentCallReport& r) const;
  std::string knowledge() const;

  std::vector<Task> route_scripted(const std::vector<const ExplorationNode*>& view,
                                   Orientation orientation) const;
  Proposal propose_scripted(const ExplorationNode& node, const std::string& param,
                            Orientation orientation) const;
  std::vector<Proposal> arbitrate_scripted(const ExplorationTree& tree,
                                           std::vector<Proposal> proposals,
                                           const BudgetState& budget) const;
  Verdict criticize_scripted(const ExplorationNode& parent, const ExplorationNode& child) const;

  const DesignSpace& space_;
  AgentOptions opts_;
  std::map<std::string, std::string> role_modes_;
  PromptLibrary prompts_;
  std::shared_ptr<Transport> transport_;
  Predictor predictor_;
  AgentObserver observer_;
};

// Renders the node list the way prompts and reports show explored designs.
std::string render_history(const std::vector<const ExplorationNode*>& view);
std::string render_point(const DesignPoint& point);
std::string render_result(const EvalResult& r);

}  // namespace pragtune
