#include "pragtune/log.hpp"

#include <fstream>
#include <set>

#include "pragtune/errors.hpp"

namespace pragtune {

struct LogWriter::Out {
  std::ofstream stream;
};

LogWriter::LogWriter(std::string path, std::function<std::int64_t()> clock)
    : path_(std::move(path)), clock_(std::move(clock)) {
  if (!path_.empty()) {
    out_ = std::make_unique<Out>();
    out_->stream.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_->stream) throw Error("cannot open log file " + path_);
  }
}

LogWriter::~LogWriter() = default;

void LogWriter::write(nlohmann::json record) {
  record["seq"] = seq_++;
  record["ts"] = clock_ ? clock_() : 0;
  if (out_) {
    out_->stream << record.dump() << '\n';
    out_->stream.flush();
  }
  records_.push_back(std::move(record));
}

namespace logrec {

nlohmann::json run_start(const nlohmann::json& config_echo) {
  nlohmann::json j = config_echo;
  j["type"] = "run_start";
  return j;
}

nlohmann::json node(const ExplorationNode& n) {
  nlohmann::json j;
  j["type"] = "node";
  j["node_id"] = n.node_id;
  j["iteration"] = n.iteration;
  if (n.parent)
    j["parent"] = *n.parent;
  else
    j["parent"] = nullptr;
  if (n.changed_param)
    j["changed_param"] = *n.changed_param;
  else
    j["changed_param"] = nullptr;
  j["point"] = n.point.assignment;
  j["point_id"] = n.point.id;
  j["result"] = n.result.to_json();
  return j;
}

nlohmann::json verdict(int node_id, const Verdict& v) {
  nlohmann::json j;
  j["type"] = "verdict";
  j["node_id"] = node_id;
  j["judgment"] = to_string(v.judgment);
  j["prune"] = v.prune;
  j["message"] = v.message;
  return j;
}

nlohmann::json prune(int node_id) {
  return nlohmann::json{{"type", "prune"}, {"node_id", node_id}};
}

nlohmann::json agent_call(const std::string& role, int iteration, const std::string& mode,
                          bool fallback, int retries) {
  return nlohmann::json{{"type", "agent_call"}, {"role", role},         {"iteration", iteration},
                        {"mode", mode},         {"fallback", fallback}, {"retries", retries}};
}

nlohmann::json tokens(const TokenUsage& u, int iteration) {
  return nlohmann::json{{"type", "tokens"},
                        {"role", u.role},
                        {"iteration", iteration},
                        {"input_tokens", u.input_tokens},
                        {"output_tokens", u.output_tokens}};
}

nlohmann::json proposal(const Proposal& p, int iteration, bool selected,
                        const std::string& reason) {
  return nlohmann::json{{"type", "proposal"},   {"iteration", iteration},
                        {"node_id", p.node_id}, {"param", p.param},
                        {"new_value", p.new_value}, {"selected", selected},
                        {"reason", reason},     {"specialist", p.specialist_id}};
}

nlohmann::json run_end(int evals_used, std::optional<int> best_node, int iterations,
                       bool stalled) {
  nlohmann::json j;
  j["type"] = "run_end";
  j["evals_used"] = evals_used;
  j["iterations"] = iterations;
  j["stalled"] = stalled;
  if (best_node)
    j["best_node"] = *best_node;
  else
    j["best_node"] = nullptr;
  return j;
}

}  // namespace logrec

std::vector<nlohmann::json> read_log(const std::string& path) {
  static const std::set<std::string> kKnown = {"run_start", "node",   "verdict", "prune",
                                               "agent_call", "tokens", "proposal", "run_end"};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptLog("cannot open log " + path, 0);
  std::vector<nlohmann::json> out;
  std::string line;
  long line_no = 0;
  long last_seq = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) throw CorruptLog("line " + std::to_string(line_no) + ": empty record", line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptLog("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("type") || !j.contains("seq") || !j.contains("ts"))
      throw CorruptLog("line " + std::to_string(line_no) + ": record misses type/seq/ts", line_no);
    if (!kKnown.count(j.at("type").get<std::string>()))
      throw CorruptLog("line " + std::to_string(line_no) + ": unknown record type '" +
                           j.at("type").get<std::string>() + "'",
                       line_no);
    long seq = j.at("seq").get<long>();
    if (seq <= last_seq)
      throw CorruptLog("line " + std::to_string(line_no) + ": sequence numbers must increase",
                       line_no);
    last_seq = seq;
    out.push_back(std::move(j));
  }
  return out;
}

ExplorationTree replay_tree(const std::vector<nlohmann::json>& records) {
  ExplorationTree tree;
  long line_no = 0;
  for (const auto& rec : records) {
    ++line_no;
    const std::string type = rec.at("type").get<std::string>();
    try {
      if (type == "node") {
        std::map<std::string, Value> assignment =
            rec.at("point").get<std::map<std::string, Value>>();
        DesignPoint point = DesignPoint::make(std::move(assignment));
        if (rec.contains("point_id") && rec.at("point_id").get<std::string>() != point.id)
          throw Error("recorded point id does not match the assignment");
        std::optional<int> parent;
        if (!rec.at("parent").is_null()) parent = rec.at("parent").get<int>();
        std::optional<std::string> changed;
        if (!rec.at("changed_param").is_null()) changed = rec.at("changed_param").get<std::string>();
        int id = tree.insert(std::move(point), EvalResult::from_json(rec.at("result")), parent,
                             std::move(changed), rec.value("iteration", 0));
        if (id != rec.at("node_id").get<int>())
          throw Error("node ids are not contiguous (got " + std::to_string(id) + ", log says " +
                      std::to_string(rec.at("node_id").get<int>()) + ")");
      } else if (type == "verdict") {
        Verdict v;
        v.judgment = judgment_from_string(rec.at("judgment").get<std::string>());
        v.prune = rec.at("prune").get<bool>();
        v.message = rec.value("message", "");
        int id = rec.at("node_id").get<int>();
        const ExplorationNode& n = tree.node(id);
        if (v.prune && v.judgment != Judgment::Worse && n.result.status == EvalStatus::Ok)
          throw Error("prune verdict on a healthy non-worse node");
        tree.attach_verdict(id, std::move(v));
      } else if (type == "prune") {
        tree.mark_pruned(rec.at("node_id").get<int>());
      }
    } catch (const CorruptLog&) {
      throw;
    } catch (const std::exception& e) {
      throw CorruptLog("record " + std::to_string(line_no) + " (" + type + "): " + e.what(),
                       line_no);
    }
  }
  return tree;
}

ExplorationTree replay(const std::string& path) { return replay_tree(read_log(path)); }

}  // namespace pragtune
