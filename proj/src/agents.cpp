#include "pragtune/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pragtune/errors.hpp"

namespace pragtune {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// First fenced block of a reply, parsed as "key: value" lines in order.
std::optional<std::vector<std::pair<std::string, std::string>>> parse_fenced_block(
    const std::string& content) {
  std::size_t open = content.find("```");
  if (open == std::string::npos) return std::nullopt;
  std::size_t body_begin = content.find('\n', open);
  if (body_begin == std::string::npos) return std::nullopt;
  ++body_begin;
  std::size_t close = content.find("```", body_begin);
  if (close == std::string::npos) return std::nullopt;

  std::vector<std::pair<std::string, std::string>> fields;
  std::istringstream in(content.substr(body_begin, close - body_begin));
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    std::size_t colon = line.find(':', start);
    if (colon == std::string::npos) return std::nullopt;  // stray prose inside the block
    std::string key = line.substr(start, colon - start);
    std::size_t vstart = line.find_first_not_of(" \t", colon + 1);
    std::string value = vstart == std::string::npos ? "" : line.substr(vstart);
    fields.emplace_back(std::move(key), std::move(value));
  }
  if (fields.empty()) return std::nullopt;
  return fields;
}

std::optional<std::int64_t> to_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool neg = s[0] == '-';
  if (neg) pos = 1;
  if (pos >= s.size()) return std::nullopt;
  std::int64_t v = 0;
  for (; pos < s.size(); ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
    v = v * 10 + (s[pos] - '0');
  }
  return neg ? -v : v;
}

Value value_from_text(const ParamDef& def, const std::string& text) {
  for (const Value& v : def.domain)
    if (v.text() == text) return v;
  throw SchemaViolation("value '" + text + "' is outside the domain of " + def.name);
}

const ExplorationNode* find_in_view(const std::vector<const ExplorationNode*>& view, int id) {
  for (const ExplorationNode* n : view)
    if (n->node_id == id) return n;
  return nullptr;
}

std::string system_prompt(const std::string& role) {
  return "You are the " + role +
         " agent of a hardware directive tuning loop. Follow the instructions and reply with "
         "exactly one fenced block in the requested format.";
}

}  // namespace

std::string Feedback::render() const {
  std::string out;
  std::size_t begin = messages.size() > static_cast<std::size_t>(rendered_tail)
                          ? messages.size() - rendered_tail
                          : 0;
  for (std::size_t i = begin; i < messages.size(); ++i) {
    out += "- " + messages[i] + "\n";
  }
  if (rejected_count > 0)
    out += "(" + std::to_string(rejected_count) + " earlier proposals were not evaluated)\n";
  if (out.empty()) out = "(none yet)\n";
  return out;
}

std::string render_point(const DesignPoint& point) {
  std::vector<std::string> parts;
  for (const auto& [name, v] : point.assignment) parts.push_back(name + "=" + v.text());
  return "{" + join(parts, ", ") + "}";
}

std::string render_result(const EvalResult& r) {
  std::ostringstream os;
  os << to_string(r.status);
  if (r.status == EvalStatus::Ok) {
    os << " latency=" << *r.latency;
    os << " max_util=" << static_cast<int>(std::lround(r.max_util() * 100)) << "%";
    os << (r.feasible ? " feasible" : " infeasible");
  }
  if (!r.diagnostic.empty()) os << " (" << r.diagnostic << ")";
  return os.str();
}

std::string render_history(const std::vector<const ExplorationNode*>& view) {
  std::string out;
  for (const ExplorationNode* n : view) {
    out += "node " + std::to_string(n->node_id) + " " + render_point(n->point) + " -> " +
           render_result(n->result);
    if (n->pruned) out += " [pruned]";
    out += "\n";
  }
  if (out.empty()) out = "(empty)\n";
  return out;
}

std::optional<std::string> AgentEngine::Reply::first(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  return std::nullopt;
}

AgentEngine::AgentEngine(const DesignSpace& space, AgentOptions opts,
                         std::map<std::string, std::string> role_modes, PromptLibrary prompts,
                         std::shared_ptr<Transport> transport, Predictor predictor)
    : space_(space),
      opts_(opts),
      role_modes_(std::move(role_modes)),
      prompts_(std::move(prompts)),
      transport_(std::move(transport)),
      predictor_(std::move(predictor)) {
  for (const auto& role : agent_roles())
    if (!role_modes_.count(role)) role_modes_[role] = "scripted";
  for (const auto& [role, mode] : role_modes_) {
    if (mode != "scripted" && mode != "llm")
      throw ConfigError("role '" + role + "': mode must be scripted|llm, got '" + mode + "'");
    if (mode == "llm" && !transport_)
      throw ConfigError("role '" + role + "' wants an llm backend but no transport is configured");
  }
}

const std::string& AgentEngine::role_mode(const std::string& role) const {
  auto it = role_modes_.find(role);
  if (it == role_modes_.end()) throw ConfigError("unknown agent role '" + role + "'");
  return it->second;
}

bool AgentEngine::llm(const std::string& role) const { return role_mode(role) == "llm"; }

void AgentEngine::report(const AgentCallReport& r) const {
  if (observer_) observer_(r);
}

std::string AgentEngine::knowledge() const { return prompts_.knowledge(space_.profile().name); }

AgentEngine::Reply AgentEngine::call_reasoner(
    const std::string& role, const std::string& prompt,
    const std::function<void(const Reply&)>& validate,
    const std::function<std::string()>& fallback_content) {
  ChatRequest req;
  req.model = opts_.model;
  req.temperature = opts_.temperature;
  req.messages = {{"system", system_prompt(role)}, {"user", prompt}};

  Reply out;
  for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
    out.retries = attempt;
    ChatResponse resp;
    try {
      resp = transport_->send(req);
    } catch (const TransportError&) {
      // Recording fixtures: a miss is filled with the scripted decision so
      // the next run replays it byte-identically.
      if (transport_->recording()) {
        transport_->record(req, fallback_content());
        continue;
      }
      continue;
    }
    out.usage.input_tokens +=
        resp.usage.prompt_tokens ? *resp.usage.prompt_tokens : estimate_tokens(req);
    out.usage.output_tokens +=
        resp.usage.completion_tokens ? *resp.usage.completion_tokens : estimate_tokens(resp.content);
    auto fields = parse_fenced_block(resp.content);
    if (!fields) continue;
    out.fields = std::move(*fields);
    try {
      validate(out);
      return out;
    } catch (const SchemaViolation&) {
      out.fields.clear();
    }
  }
  out.fallback = true;
  return out;
}

// ---------------------------------------------------------------------------
// Router

std::vector<Task> AgentEngine::route_scripted(const std::vector<const ExplorationNode*>& view,
                                              Orientation orientation) const {
  const ExplorationNode* pick = nullptr;
  if (orientation == Orientation::Performance) {
    for (const ExplorationNode* n : view) {
      if (!n->result.feasible) continue;
      if (!pick || *n->result.latency < *pick->result.latency) pick = n;
    }
    if (!pick)  // no feasible design in view: take the best-measured one
      for (const ExplorationNode* n : view) {
        if (n->result.status != EvalStatus::Ok) continue;
        if (!pick || *n->result.latency < *pick->result.latency) pick = n;
      }
  } else {
    // Prefer the design closest to feasibility; with nothing to repair, poke
    // at the node with the highest pressure.
    int best_violations = std::numeric_limits<int>::max();
    for (const ExplorationNode* n : view) {
      if (n->result.feasible) continue;
      int v = n->result.status == EvalStatus::Ok ? n->result.violated_resources() : 0;
      if (v < best_violations) {
        best_violations = v;
        pick = n;
      }
    }
    if (!pick) {
      double best_util = -1.0;
      for (const ExplorationNode* n : view) {
        double u = n->result.max_util();
        if (u > best_util) {
          best_util = u;
          pick = n;
        }
      }
    }
  }
  if (!pick) throw NoCandidates("router found no usable node in the view");
  Task t;
  t.node_id = pick->node_id;
  t.orientation = orientation;
  t.rationale = orientation == Orientation::Performance
                    ? "lowest-latency feasible design in view"
                    : "design under the most resource pressure";
  return {t};
}

std::vector<Task> AgentEngine::route(const ExplorationTree& tree,
                                     const std::vector<const ExplorationNode*>& view,
                                     const Feedback& fb, Orientation orientation) {
  (void)tree;
  if (view.empty()) throw NoCandidates("router view is empty (all nodes pruned)");

  if (!llm("router")) {
    auto tasks = route_scripted(view, orientation);
    report({"router", "scripted", false, 0, {"router", 0, 0}});
    return tasks;
  }

  std::string prompt = PromptLibrary::render(
      prompts_.role_template("router"),
      {{"code", space_.kernel_template()},
       {"history", render_history(view)},
       {"feedback", fb.render()},
       {"knowledge", knowledge()},
       {"orientation", to_string(orientation)}});

  std::vector<Task> tasks;
  auto validate = [&](const Reply& r) {
    std::vector<Task> parsed;
    for (const auto& [k, v] : r.fields) {
      if (k != "task") continue;
      auto id = to_int(v);
      if (!id) throw SchemaViolation("task id '" + v + "' is not an integer");
      const ExplorationNode* n = find_in_view(view, static_cast<int>(*id));
      if (!n || n->pruned)
        throw SchemaViolation("task id " + v + " is not an unpruned node of the view");
      Task t;
      t.node_id = static_cast<int>(*id);
      t.orientation = orientation;
      if (auto rat = r.first("rationale")) t.rationale = *rat;
      parsed.push_back(std::move(t));
    }
    if (parsed.empty()) throw SchemaViolation("reply names no task");
    tasks = std::move(parsed);
  };
  auto fallback_text = [&]() {
    Task t = route_scripted(view, orientation)[0];
    return "```\ntask: " + std::to_string(t.node_id) + "\nrationale: " + t.rationale + "\n```\n";
  };

  Reply reply = call_reasoner("router", prompt, validate, fallback_text);
  if (reply.fallback) tasks = route_scripted(view, orientation);
  report({"router", "llm", reply.fallback, reply.retries,
          {"router", reply.usage.input_tokens, reply.usage.output_tokens}});
  return tasks;
}

// ---------------------------------------------------------------------------
// Specialists

namespace {

// Closest ordered neighbors of the current value inside the candidate list.
struct Steps {
  std::optional<Value> up;    // lowest candidate above the current index
  std::optional<Value> down;  // highest candidate below the current index
};

Steps domain_steps(const ParamDef& def, const Value& current,
                   const std::vector<Value>& candidates) {
  Steps s;
  int cur = def.domain_index(current);
  int best_up = std::numeric_limits<int>::max();
  int best_down = -1;
  for (const Value& v : candidates) {
    int i = def.domain_index(v);
    if (i > cur && i < best_up) {
      best_up = i;
      s.up = v;
    }
    if (i < cur && i > best_down) {
      best_down = i;
      s.down = v;
    }
  }
  return s;
}

}  // namespace

Proposal AgentEngine::propose_scripted(const ExplorationNode& node, const std::string& param,
                                       Orientation orientation) const {
  const ParamDef& def = space_.param(param);
  const Value& current = node.point.at(param);
  std::vector<Value> candidates;
  for (const Value& v : legal_values(space_, node.point, param))
    if (v != current) candidates.push_back(v);
  if (candidates.empty())
    throw FrozenParam("param '" + param + "' has no legal alternative at node " +
                      std::to_string(node.node_id));

  Steps steps = domain_steps(def, current, candidates);
  std::optional<Value> picked;

  auto doubled = [&]() -> std::optional<Value> {
    // Smallest legal factor at least twice the current one.
    std::optional<Value> best;
    for (const Value& v : candidates)
      if (v.is_int() && v.as_int() >= 2 * current.as_int())
        if (!best || v.as_int() < best->as_int()) best = v;
    return best;
  };
  auto halved = [&]() -> std::optional<Value> {
    // Largest legal factor at most half the current one.
    std::optional<Value> best;
    for (const Value& v : candidates)
      if (v.is_int() && 2 * v.as_int() <= current.as_int())
        if (!best || v.as_int() > best->as_int()) best = v;
    return best;
  };

  if (orientation == Orientation::Performance) {
    switch (def.kind) {
      case ParamKind::Parallel:
        picked = doubled();
        if (!picked) picked = steps.down;  // at the top: fall back a notch
        break;
      case ParamKind::Tile:
        picked = steps.down;  // smaller tiles buy nothing but BRAM
        if (!picked) picked = steps.up;
        break;
      default:
        picked = steps.up;  // off -> cg -> fg and friends
        if (!picked) picked = steps.down;
        break;
    }
  } else {
    switch (def.kind) {
      case ParamKind::Tile:
        picked = steps.up;  // coarser tiling relieves BRAM and timeouts
        if (!picked) picked = steps.down;
        break;
      case ParamKind::Parallel:
        picked = halved();
        if (!picked) picked = steps.down;
        if (!picked) picked = steps.up;
        break;
      default:
        picked = steps.down;  // back toward the conservative default
        if (!picked) picked = steps.up;
        break;
    }
  }
  if (!picked) picked = candidates.front();

  Proposal p;
  p.node_id = node.node_id;
  p.param = param;
  p.old_value = current;
  p.new_value = *picked;
  p.prediction = orientation == Orientation::Performance ? "expects a latency improvement"
                                                         : "expects lower resource pressure";
  p.specialist_id = std::string(orientation == Orientation::Performance ? "perf" : "res") + ":" +
                    param;
  return p;
}

Proposal AgentEngine::propose(const ExplorationTree& tree, const Task& task,
                              const std::string& param,
                              const std::vector<const ExplorationNode*>& view,
                              const Feedback& fb) {
  const ExplorationNode& node = tree.node(task.node_id);
  const ParamDef& def = space_.param(param);
  const Value& current = node.point.at(param);

  std::vector<Value> alternatives;
  for (const Value& v : legal_values(space_, node.point, param))
    if (v != current) alternatives.push_back(v);
  if (alternatives.empty())
    throw FrozenParam("param '" + param + "' has no legal alternative at node " +
                      std::to_string(node.node_id));

  if (!llm("specialist")) {
    Proposal p = propose_scripted(node, param, task.orientation);
    report({"specialist", "scripted", false, 0, {"specialist", 0, 0}});
    return p;
  }

  std::vector<std::string> alt_text;
  for (const Value& v : alternatives) alt_text.push_back(v.text());
  std::string prompt = PromptLibrary::render(
      prompts_.role_template("specialist"),
      {{"code", space_.kernel_template()},
       {"task_node", std::to_string(node.node_id)},
       {"task_point", render_point(node.point)},
       {"task_rationale", task.rationale},
       {"orientation", to_string(task.orientation)},
       {"param", param},
       {"param_kind", to_string(def.kind)},
       {"attach", def.attach},
       {"current", current.text()},
       {"alternatives", join(alt_text, ", ")},
       {"history", render_history(view)},
       {"feedback", fb.render()},
       {"knowledge", knowledge()}});

  Proposal parsed;
  auto validate = [&](const Reply& r) {
    auto pname = r.first("param");
    auto pvalue = r.first("value");
    if (!pname || *pname != param) throw SchemaViolation("reply names the wrong parameter");
    if (!pvalue) throw SchemaViolation("reply carries no value");
    Value v = value_from_text(def, *pvalue);
    if (v == current) throw SchemaViolation("proposed value equals the current value");
    if (std::find(alternatives.begin(), alternatives.end(), v) == alternatives.end())
      throw SchemaViolation("proposed value is not legal at this node");
    parsed.node_id = node.node_id;
    parsed.param = param;
    parsed.old_value = current;
    parsed.new_value = v;
    parsed.prediction = r.first("prediction").value_or("");
    parsed.specialist_id =
        std::string(task.orientation == Orientation::Performance ? "perf" : "res") + ":" + param;
  };
  auto fallback_text = [&]() {
    Proposal p = propose_scripted(node, param, task.orientation);
    return "```\nparam: " + param + "\nvalue: " + p.new_value.text() +
           "\nprediction: " + p.prediction + "\n```\n";
  };

  Reply reply = call_reasoner("specialist", prompt, validate, fallback_text);
  if (reply.fallback) parsed = propose_scripted(node, param, task.orientation);
  report({"specialist", "llm", reply.fallback, reply.retries,
          {"specialist", reply.usage.input_tokens, reply.usage.output_tokens}});
  return parsed;
}

// ---------------------------------------------------------------------------
// Arbitrator

std::vector<Proposal> AgentEngine::arbitrate_scripted(const ExplorationTree& tree,
                                                      std::vector<Proposal> proposals,
                                                      const BudgetState& budget) const {
  struct Ranked {
    Proposal p;
    double delta;
    bool timeout;
  };
  std::vector<Ranked> ranked;
  for (Proposal& p : proposals) {
    const ExplorationNode& parent = tree.node(p.node_id);
    DesignPoint child = parent.point.with(p.param, p.new_value);
    EvalResult pred = predictor_ ? predictor_(child) : EvalResult{};
    double delta = std::numeric_limits<double>::infinity();
    bool timeout = pred.status == EvalStatus::Timeout;
    if (pred.status == EvalStatus::Ok && parent.result.latency)
      delta = static_cast<double>(*pred.latency) - static_cast<double>(*parent.result.latency);
    ranked.push_back({std::move(p), delta, timeout});
  }
  if (budget.late()) {
    ranked.erase(std::remove_if(ranked.begin(), ranked.end(),
                                [](const Ranked& r) { return r.timeout; }),
                 ranked.end());
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.delta < b.delta; });
  std::vector<Proposal> out;
  for (auto& r : ranked) {
    if (static_cast<int>(out.size()) >= opts_.batch_size) break;
    out.push_back(std::move(r.p));
  }
  return out;
}

std::vector<Proposal> AgentEngine::arbitrate(const ExplorationTree& tree,
                                             std::vector<Proposal> proposals,
                                             const BudgetState& budget) {
  // Duplicates collapse before any ranking.
  std::vector<Proposal> unique;
  for (Proposal& p : proposals)
    if (std::find(unique.begin(), unique.end(), p) == unique.end())
      unique.push_back(std::move(p));

  if (unique.empty()) return {};

  if (!llm("arbitrator")) {
    auto out = arbitrate_scripted(tree, unique, budget);
    report({"arbitrator", "scripted", false, 0, {"arbitrator", 0, 0}});
    return out;
  }

  std::string listing;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const Proposal& p = unique[i];
    const ExplorationNode& parent = tree.node(p.node_id);
    listing += std::to_string(i) + ": node " + std::to_string(p.node_id) + " " + p.param + " " +
               p.old_value.text() + " -> " + p.new_value.text() + " (" + p.specialist_id +
               ", parent " + render_result(parent.result) + ")";
    if (!p.prediction.empty()) listing += " prediction: " + p.prediction;
    listing += "\n";
  }
  std::ostringstream phase;
  phase.setf(std::ios::fixed);
  phase.precision(2);
  phase << budget.phase();

  std::string prompt = PromptLibrary::render(
      prompts_.role_template("arbitrator"),
      {{"proposals", listing},
       {"evals_used", std::to_string(budget.evals_used)},
       {"evals_max", std::to_string(budget.evals_max)},
       {"phase", phase.str()},
       {"batch_size", std::to_string(opts_.batch_size)},
       {"knowledge", knowledge()}});

  std::vector<Proposal> selected;
  auto validate = [&](const Reply& r) {
    auto sel = r.first("select");
    if (!sel) throw SchemaViolation("reply carries no selection");
    std::vector<Proposal> parsed;
    if (*sel != "none" && !sel->empty()) {
      std::istringstream in(*sel);
      std::string tok;
      std::vector<int> seen;
      while (std::getline(in, tok, ',')) {
        std::size_t b = tok.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = tok.find_last_not_of(" \t");
        auto idx = to_int(tok.substr(b, e - b + 1));
        if (!idx || *idx < 0 || *idx >= static_cast<std::int64_t>(unique.size()))
          throw SchemaViolation("selection index '" + tok + "' is out of range");
        if (std::find(seen.begin(), seen.end(), static_cast<int>(*idx)) != seen.end())
          throw SchemaViolation("selection repeats index " + tok);
        seen.push_back(static_cast<int>(*idx));
        parsed.push_back(unique[*idx]);
      }
    }
    if (static_cast<int>(parsed.size()) > opts_.batch_size)
      throw SchemaViolation("selection exceeds the batch size");
    selected = std::move(parsed);
  };
  auto fallback_text = [&]() {
    auto picks = arbitrate_scripted(tree, unique, budget);
    std::vector<std::string> idx;
    for (const Proposal& p : picks)
      for (std::size_t i = 0; i < unique.size(); ++i)
        if (unique[i] == p) idx.push_back(std::to_string(i));
    return "```\nselect: " + (idx.empty() ? std::string("none") : join(idx, ", ")) + "\n```\n";
  };

  Reply reply = call_reasoner("arbitrator", prompt, validate, fallback_text);
  if (reply.fallback) selected = arbitrate_scripted(tree, unique, budget);
  report({"arbitrator", "llm", reply.fallback, reply.retries,
          {"arbitrator", reply.usage.input_tokens, reply.usage.output_tokens}});
  return selected;
}

// ---------------------------------------------------------------------------
// Critic

Verdict AgentEngine::criticize_scripted(const ExplorationNode& parent,
                                        const ExplorationNode& child) const {
  Verdict v;
  const EvalResult& p = parent.result;
  const EvalResult& c = child.result;

  if (c.status != EvalStatus::Ok) {
    if (p.status == EvalStatus::Ok) {
      v.judgment = Judgment::Worse;
      v.prune = true;  // status degradation kills the branch
    } else {
      v.judgment = Judgment::Neutral;
    }
  } else if (c.feasible && (!p.feasible || *c.latency < *p.latency)) {
    v.judgment = Judgment::Better;
  } else if (p.status == EvalStatus::Ok && p.latency &&
             static_cast<double>(*c.latency) >
                 static_cast<double>(*p.latency) * (1.0 + opts_.epsilon)) {
    v.judgment = Judgment::Worse;
  } else {
    v.judgment = Judgment::Neutral;
  }

  std::ostringstream msg;
  msg << "node " << child.node_id << " (" << child.changed_param.value_or("?") << " "
      << (child.changed_param ? parent.point.at(*child.changed_param).text() : "?") << "->"
      << (child.changed_param ? child.point.at(*child.changed_param).text() : "?") << ") is "
      << to_string(v.judgment) << " than node " << parent.node_id << ": "
      << render_result(c) << " vs " << render_result(p);
  if (v.prune) msg << "; branch pruned";
  v.message = msg.str();
  return v;
}

Verdict AgentEngine::criticize(const ExplorationNode& parent, const ExplorationNode& child) {
  int diff = hamming_distance(parent.point, child.point);
  if (diff != 1)
    throw MultiParamDiff("critic compares designs differing in " + std::to_string(diff) +
                         " parameters");

  if (!llm("critic")) {
    Verdict v = criticize_scripted(parent, child);
    report({"critic", "scripted", false, 0, {"critic", 0, 0}});
    return v;
  }

  std::string warnings;
  for (const auto& w : child.result.warnings) warnings += w + "\n";
  if (warnings.empty()) warnings = "(none)\n";

  std::string prompt = PromptLibrary::render(
      prompts_.role_template("critic"),
      {{"parent_node", std::to_string(parent.node_id)},
       {"parent_point", render_point(parent.point)},
       {"parent_result", render_result(parent.result)},
       {"child_node", std::to_string(child.node_id)},
       {"child_point", render_point(child.point)},
       {"child_result", render_result(child.result)},
       {"changed_param", child.changed_param.value_or("?")},
       {"warnings", warnings}});

  Verdict parsed;
  auto validate = [&](const Reply& r) {
    auto judgment = r.first("judgment");
    auto prune = r.first("prune");
    if (!judgment || !prune) throw SchemaViolation("reply misses judgment/prune");
    Verdict v;
    try {
      v.judgment = judgment_from_string(*judgment);
    } catch (const Error& e) {
      throw SchemaViolation(e.what());
    }
    if (*prune == "true")
      v.prune = true;
    else if (*prune == "false")
      v.prune = false;
    else
      throw SchemaViolation("prune must be true|false");
    if (v.prune && v.judgment != Judgment::Worse && child.result.status == EvalStatus::Ok)
      throw SchemaViolation("prune requires a worse judgment or a failed child");
    v.message = r.first("message").value_or("");
    parsed = std::move(v);
  };
  auto fallback_text = [&]() {
    Verdict v = criticize_scripted(parent, child);
    return std::string("```\njudgment: ") + to_string(v.judgment) +
           "\nprune: " + (v.prune ? "true" : "false") + "\nmessage: " + v.message + "\n```\n";
  };

  Reply reply = call_reasoner("critic", prompt, validate, fallback_text);
  if (reply.fallback) parsed = criticize_scripted(parent, child);
  report({"critic", "llm", reply.fallback, reply.retries,
          {"critic", reply.usage.input_tokens, reply.usage.output_tokens}});
  return parsed;
}

}  // namespace pragtune
