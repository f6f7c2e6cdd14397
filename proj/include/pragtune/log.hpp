#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pragtune/history.hpp"

namespace pragtune {

// Append-only run log, one JSON record per line. Sequence numbers are
// strictly increasing; the timestamp is the logical clock of the run (the
// number of evaluations consumed), which keeps identical runs byte-identical.
class LogWriter {
 public:
  // `path` may be empty for an in-memory log (tests). `clock` supplies the
  // logical timestamp for each record.
  LogWriter(std::string path, std::function<std::int64_t()> clock);
  ~LogWriter();

  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  // Stamps seq/ts, appends to the file (flushing the line) and to the
  // in-memory record list.
  void write(nlohmann::json record);

  const std::vector<nlohmann::json>& records() const { return records_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::function<std::int64_t()> clock_;
  std::vector<nlohmann::json> records_;
  long seq_ = 0;
  struct Out;
  std::unique_ptr<Out> out_;
};

// Record constructors used by both explorers, so logs stay uniform.
namespace logrec {
nlohmann::json run_start(const nlohmann::json& config_echo);
nlohmann::json node(const ExplorationNode& n);
nlohmann::json verdict(int node_id, const Verdict& v);
nlohmann::json prune(int node_id);
nlohmann::json agent_call(const std::string& role, int iteration, const std::string& mode,
                          bool fallback, int retries);
nlohmann::json tokens(const TokenUsage& u, int iteration);
nlohmann::json proposal(const Proposal& p, int iteration, bool selected,
                        const std::string& reason);
nlohmann::json run_end(int evals_used, std::optional<int> best_node, int iterations,
                       bool stalled);
}  // namespace logrec

// Reads and structurally validates a log file: line-wise JSON, known record
// types, strictly increasing sequence numbers. Throws CorruptLog with the
// offending line number.
std::vector<nlohmann::json> read_log(const std::string& path);

// Rebuilds the exploration tree from node/verdict/prune records, re-checking
// every insert contract. Throws CorruptLog on the first violated invariant.
ExplorationTree replay_tree(const std::vector<nlohmann::json>& records);

// Convenience: read_log + replay_tree.
ExplorationTree replay(const std::string& path);

}  // namespace pragtune
