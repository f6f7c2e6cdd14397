#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pragtune/design_space.hpp"
#include "pragtune/eval.hpp"
#include "pragtune/messages.hpp"

namespace pragtune {

// One explored design in the search tree.
struct ExplorationNode {
  int node_id = 0;
  DesignPoint point;
  EvalResult result;
  std::optional<int> parent;
  std::optional<std::string> changed_param;  // absent only for the root
  std::optional<Verdict> verdict;
  bool pruned = false;
  int iteration = 0;
};

// Append-only exploration tree. Single writer; readers see stable node
// references (nodes are stored behind unique_ptr, never relocated).
class ExplorationTree {
 public:
  // Appends a node. Rejects duplicates, pruned parents and multi-parameter
  // edges. Root inserts pass no parent and no changed_param.
  int insert(DesignPoint point, EvalResult result, std::optional<int> parent,
             std::optional<std::string> changed_param, int iteration = 0);

  void attach_verdict(int node_id, Verdict v);
  void mark_pruned(int node_id);

  const ExplorationNode& node(int node_id) const;
  bool contains(int node_id) const { return node_id >= 0 && node_id < size(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }

  // Node id holding the given assignment, if already explored.
  std::optional<int> find_point(const std::string& point_id) const;

  std::vector<const ExplorationNode*> unpruned() const;
  int unpruned_count() const;

  // Feasible node with minimum latency; ties resolve to the lowest node id.
  // Throws NoFeasible when the tree holds no feasible design.
  const ExplorationNode& best() const;
  bool has_feasible() const;

  // Top-K representative subset of the unpruned nodes: always the best
  // feasible and the most recent node, the rest greedily by latency rank
  // subject to pairwise assignment distance >= d_min (relaxed when slots
  // cannot be filled). Ordered by node id.
  std::vector<const ExplorationNode*> curate(int k, int d_min = 2) const;

 private:
  std::vector<std::unique_ptr<ExplorationNode>> nodes_;
  std::map<std::string, int> by_point_id_;
};

}  // namespace pragtune
