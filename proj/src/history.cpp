#include "pragtune/history.hpp"

#include <algorithm>
#include <limits>

#include "pragtune/errors.hpp"

namespace pragtune {

const char* to_string(Orientation o) {
  return o == Orientation::Performance ? "performance" : "resource";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "performance") return Orientation::Performance;
  if (s == "resource") return Orientation::Resource;
  throw Error("unknown orientation '" + s + "'");
}

const char* to_string(Judgment j) {
  switch (j) {
    case Judgment::Better: return "better";
    case Judgment::Worse: return "worse";
    case Judgment::Neutral: return "neutral";
  }
  return "?";
}

Judgment judgment_from_string(const std::string& s) {
  if (s == "better") return Judgment::Better;
  if (s == "worse") return Judgment::Worse;
  if (s == "neutral") return Judgment::Neutral;
  throw Error("unknown judgment '" + s + "'");
}

int ExplorationTree::insert(DesignPoint point, EvalResult result, std::optional<int> parent,
                            std::optional<std::string> changed_param, int iteration) {
  if (auto existing = find_point(point.id))
    throw DuplicatePoint("assignment already explored as node " + std::to_string(*existing),
                         *existing);
  if (parent) {
    if (!contains(*parent)) throw Error("parent node " + std::to_string(*parent) + " does not exist");
    const ExplorationNode& p = node(*parent);
    if (p.pruned) throw PrunedParent("node " + std::to_string(*parent) + " is pruned");
    if (!changed_param) throw MultiParamDiff("child insert needs the changed parameter");
    int diff = hamming_distance(p.point, point);
    if (diff != 1)
      throw MultiParamDiff("child differs from parent in " + std::to_string(diff) +
                           " parameters, expected exactly 1");
    auto it = point.assignment.find(*changed_param);
    if (it == point.assignment.end() || p.point.at(*changed_param) == it->second)
      throw MultiParamDiff("changed_param '" + *changed_param + "' does not carry the difference");
  } else {
    if (!nodes_.empty()) throw Error("only the first insert may omit the parent");
    if (changed_param) throw MultiParamDiff("root insert cannot name a changed parameter");
  }

  auto n = std::make_unique<ExplorationNode>();
  n->node_id = size();
  n->point = std::move(point);
  n->result = std::move(result);
  n->parent = parent;
  n->changed_param = std::move(changed_param);
  n->iteration = iteration;
  by_point_id_[n->point.id] = n->node_id;
  nodes_.push_back(std::move(n));
  return nodes_.back()->node_id;
}

void ExplorationTree::attach_verdict(int node_id, Verdict v) {
  if (!contains(node_id)) throw Error("no node " + std::to_string(node_id));
  nodes_[node_id]->verdict = std::move(v);
}

void ExplorationTree::mark_pruned(int node_id) {
  if (!contains(node_id)) throw Error("no node " + std::to_string(node_id));
  nodes_[node_id]->pruned = true;
}

const ExplorationNode& ExplorationTree::node(int node_id) const {
  if (!contains(node_id)) throw Error("no node " + std::to_string(node_id));
  return *nodes_[node_id];
}

std::optional<int> ExplorationTree::find_point(const std::string& point_id) const {
  auto it = by_point_id_.find(point_id);
  if (it == by_point_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<const ExplorationNode*> ExplorationTree::unpruned() const {
  std::vector<const ExplorationNode*> out;
  for (const auto& n : nodes_)
    if (!n->pruned) out.push_back(n.get());
  return out;
}

int ExplorationTree::unpruned_count() const {
  int n = 0;
  for (const auto& node : nodes_)
    if (!node->pruned) ++n;
  return n;
}

bool ExplorationTree::has_feasible() const {
  for (const auto& n : nodes_)
    if (n->result.feasible) return true;
  return false;
}

const ExplorationNode& ExplorationTree::best() const {
  const ExplorationNode* best = nullptr;
  for (const auto& n : nodes_) {
    if (!n->result.feasible) continue;
    if (!best || *n->result.latency < *best->result.latency) best = n.get();
  }
  if (!best) throw NoFeasible("no feasible design in the tree");
  return *best;
}

std::vector<const ExplorationNode*> ExplorationTree::curate(int k, int d_min) const {
  std::vector<const ExplorationNode*> pool = unpruned();
  std::size_t want = std::min<std::size_t>(k < 1 ? 1 : k, pool.size());

  std::vector<const ExplorationNode*> picked;
  auto pick = [&](const ExplorationNode* n) {
    if (std::find(picked.begin(), picked.end(), n) == picked.end()) picked.push_back(n);
  };

  // Anchors: the global best feasible design and the freshest node.
  if (has_feasible()) {
    const ExplorationNode& b = best();
    if (!b.pruned) pick(&b);
  }
  if (!pool.empty()) pick(pool.back());

  // Latency rank: feasible first by latency, then remaining by node id.
  std::vector<const ExplorationNode*> ranked = pool;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ExplorationNode* a, const ExplorationNode* b) {
                     bool la = a->result.latency.has_value();
                     bool lb = b->result.latency.has_value();
                     if (la != lb) return la;
                     if (la && *a->result.latency != *b->result.latency)
                       return *a->result.latency < *b->result.latency;
                     return a->node_id < b->node_id;
                   });

  for (int spacing = std::max(d_min, 0); picked.size() < want; --spacing) {
    for (const ExplorationNode* cand : ranked) {
      if (picked.size() >= want) break;
      if (std::find(picked.begin(), picked.end(), cand) != picked.end()) continue;
      bool far_enough = true;
      for (const ExplorationNode* p : picked)
        if (hamming_distance(cand->point, p->point) < spacing) {
          far_enough = false;
          break;
        }
      if (far_enough) picked.push_back(cand);
    }
    if (spacing == 0) break;  // everything qualifies at spacing 0
  }

  std::sort(picked.begin(), picked.end(),
            [](const ExplorationNode* a, const ExplorationNode* b) {
              return a->node_id < b->node_id;
            });
  return picked;
}

}  // namespace pragtune
