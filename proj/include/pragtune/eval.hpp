#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pragtune/design_space.hpp"
#include "pragtune/kernel_model.hpp"

namespace pragtune {

// Designs stay feasible while every resource utilization is at most this.
constexpr double kUtilizationCap = 0.80;

enum class EvalStatus { Ok, Timeout, Invalid };

const char* to_string(EvalStatus s);
EvalStatus eval_status_from_string(const std::string& s);

// Resource kinds, in reporting order.
inline const std::vector<std::string>& resource_kinds() {
  static const std::vector<std::string> kinds = {"LUT", "FF", "DSP", "BRAM", "URAM"};
  return kinds;
}

struct EvalResult {
  EvalStatus status = EvalStatus::Invalid;
  std::optional<std::int64_t> latency;         // present iff Ok
  std::map<std::string, double> util;          // fraction of budget, present iff Ok
  bool feasible = false;                       // Ok and all util <= 0.80
  std::string source = "surrogate";            // surrogate | report
  std::string diagnostic;                      // error text for Invalid
  std::vector<std::string> warnings;           // log warnings, for the critic

  double max_util() const;
  int violated_resources() const;  // count of util entries above the cap

  nlohmann::json to_json() const;
  static EvalResult from_json(const nlohmann::json& j);
};

// Recomputes the feasibility flag from status and utilization.
void finalize_feasibility(EvalResult& r);

// Device capacity, plus the synthesis-effort ceiling that models missing
// feedback on over-aggressive designs.
struct ResourceBudget {
  std::map<std::string, std::int64_t> totals = {
      {"LUT", 100000}, {"FF", 100000}, {"DSP", 512}, {"BRAM", 280}, {"URAM", 64}};
  std::int64_t synth_cost_limit = 4096;

  void validate() const;  // all totals positive
  static ResourceBudget from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Tunable constants of the analytical model.
struct SurrogateOptions {
  std::int64_t bram_depth = 512;  // elements per BRAM bank unit
  std::int64_t lut_per_dsp_op = 50;
  std::int64_t lut_per_bank = 10;
};

// Deterministic analytical latency/resource model over the loop nest.
EvalResult surrogate_evaluate(const KernelModel& kernel, const DesignSpace& space,
                              const DesignPoint& point, const ResourceBudget& budget,
                              const SurrogateOptions& opts = {});

// Total parser for toolchain reports. Never throws; anything that does not
// follow the report grammar maps to Invalid.
EvalResult parse_report(const std::string& report_text, const std::string& log_text);

// Uniform evaluation handle the explorers talk to.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvalResult evaluate(const DesignSpace& space, const DesignPoint& point) = 0;
  virtual std::string name() const = 0;
  // Evaluators must be safe to call from the explorer's worker pool.
  virtual bool concurrent_safe() const { return false; }
};

class SurrogateEvaluator final : public Evaluator {
 public:
  SurrogateEvaluator(ResourceBudget budget, SurrogateOptions opts = {})
      : budget_(std::move(budget)), opts_(opts) {}
  EvalResult evaluate(const DesignSpace& space, const DesignPoint& point) override;
  std::string name() const override { return "surrogate"; }
  bool concurrent_safe() const override { return true; }
  const ResourceBudget& budget() const { return budget_; }

 private:
  ResourceBudget budget_;
  SurrogateOptions opts_;
};

// Renders the point, writes the source, invokes an external command, then
// parses the report it leaves behind. `{src}` and `{out}` in the command
// template expand to the source path and the invocation directory.
struct AdapterConfig {
  std::string command;           // e.g. "./run_hls.sh {src} {out}"
  std::string workdir = ".";     // parent for per-invocation directories
  std::string report_file = "report.txt";
  std::string log_file = "log.txt";
  std::string source_file = "kernel.c";
};

class AdapterEvaluator final : public Evaluator {
 public:
  explicit AdapterEvaluator(AdapterConfig cfg) : cfg_(std::move(cfg)) {}
  EvalResult evaluate(const DesignSpace& space, const DesignPoint& point) override;
  std::string name() const override { return "adapter"; }

 private:
  AdapterConfig cfg_;
};

}  // namespace pragtune
