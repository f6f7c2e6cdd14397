#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pragtune/errors.hpp"
#include "pragtune/eval.hpp"

namespace pragtune {

namespace {

// Large totals saturate instead of wrapping; the cap leaves headroom for sums.
constexpr std::int64_t kSat = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a > kSat - b) return kSat;
  return a + b;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Pipeline behavior after backend normalization.
enum class PipeMode { Off, Overlap, Flatten, Handshake };

PipeMode normalize_mode(const std::string& token) {
  if (token == "off") return PipeMode::Off;
  if (token == "cg" || token == "auto" || token == "hs") return PipeMode::Overlap;
  if (token == "fg") return PipeMode::Flatten;
  if (token == "ss") return PipeMode::Handshake;
  return PipeMode::Off;
}

struct DirectiveView {
  std::map<std::string, std::int64_t> parallel;  // loop id -> factor
  std::map<std::string, std::int64_t> tile;      // loop id -> factor
  std::map<std::string, PipeMode> pipeline;      // loop id -> mode
  std::map<std::string, bool> partition_off;     // array id -> partitioning disabled
  std::map<std::string, bool> reg_array;         // array id -> register storage
};

DirectiveView collect_directives(const KernelModel& kernel, const DesignSpace& space,
                                 const DesignPoint& point) {
  DirectiveView dv;
  for (const ParamDef& p : space.params()) {
    const Value& v = point.at(p.name);
    switch (p.kind) {
      case ParamKind::Parallel:
      case ParamKind::Pipeline:
      case ParamKind::Tile:
        if (!kernel.has_loop(p.attach))
          throw UnknownLoopAttachment("param '" + p.name + "' attaches to unknown loop '" +
                                      p.attach + "'");
        break;
      case ParamKind::ArrayPartition:
      case ParamKind::ArrayType:
        if (!kernel.arrays.count(p.attach))
          throw UnknownLoopAttachment("param '" + p.name + "' attaches to unknown array '" +
                                      p.attach + "'");
        break;
    }
    switch (p.kind) {
      case ParamKind::Parallel: dv.parallel[p.attach] = v.as_int(); break;
      case ParamKind::Tile: dv.tile[p.attach] = v.as_int(); break;
      case ParamKind::Pipeline: dv.pipeline[p.attach] = normalize_mode(v.as_token()); break;
      case ParamKind::ArrayPartition: dv.partition_off[p.attach] = v.as_token() == "off"; break;
      case ParamKind::ArrayType: dv.reg_array[p.attach] = v.as_token() == "reg"; break;
    }
  }
  return dv;
}

struct Model {
  const KernelModel& kernel;
  const DirectiveView& dv;
  const SurrogateOptions& opts;

  std::map<std::string, std::int64_t> banks_needed;  // array -> replication demand
  std::map<std::string, std::int64_t> tile_div;      // array -> tile division
  std::int64_t dsp = 0;
  std::int64_t synth_cost = 0;

  std::int64_t factor(const LoopNode& l, bool under_flatten) const {
    if (under_flatten) return l.trip_count;  // flatten fully parallelizes descendants
    auto it = dv.parallel.find(l.id);
    return it == dv.parallel.end() ? 1 : it->second;
  }

  PipeMode mode(const LoopNode& l) const {
    auto it = dv.pipeline.find(l.id);
    return it == dv.pipeline.end() ? PipeMode::Off : it->second;
  }

  // One pass accumulating replication-driven figures.
  void collect(const LoopNode& l, std::int64_t path_product, bool under_flatten) {
    std::int64_t f = factor(l, under_flatten);
    std::int64_t path = sat_mul(path_product, f);
    synth_cost = sat_add(synth_cost, path);
    dsp = sat_add(dsp, sat_mul(l.body_dsp, path));
    for (const std::string& a : unique_accesses(l)) {
      auto [it, fresh] = banks_needed.emplace(a, f);
      if (!fresh) it->second = sat_mul(it->second, f);
    }
    bool flatten_below = under_flatten || mode(l) == PipeMode::Flatten;
    for (const LoopNode& c : l.children) collect(c, path, flatten_below);
    // Tiling a loop shrinks the buffered footprint of everything it touches.
    auto t = dv.tile.find(l.id);
    if (t != dv.tile.end() && t->second > 1)
      for (const std::string& a : subtree_accesses(l)) {
        auto [it, fresh] = tile_div.emplace(a, t->second);
        if (!fresh) it->second = sat_mul(it->second, t->second);
      }
  }

  static std::vector<std::string> unique_accesses(const LoopNode& l) {
    std::vector<std::string> out;
    for (const auto& a : l.accesses)
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return out;
  }

  static std::vector<std::string> subtree_accesses(const LoopNode& l) {
    std::vector<std::string> out;
    std::function<void(const LoopNode&)> walk = [&](const LoopNode& n) {
      for (const auto& a : n.accesses)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
      for (const auto& c : n.children) walk(c);
    };
    walk(l);
    return out;
  }

  std::int64_t latency(const LoopNode& l, bool under_flatten) const {
    std::int64_t body = l.body_cost;
    bool flatten_below = under_flatten || mode(l) == PipeMode::Flatten;
    std::int64_t children = 0;
    for (const LoopNode& c : l.children) children = sat_add(children, latency(c, flatten_below));
    std::int64_t per_iter = sat_add(body, children);

    std::int64_t f = factor(l, under_flatten);
    std::int64_t iters = ceil_div(l.trip_count, std::min(f, l.trip_count));
    PipeMode m = under_flatten ? PipeMode::Off : mode(l);

    switch (m) {
      case PipeMode::Off: return sat_mul(iters, per_iter);
      case PipeMode::Handshake: return sat_mul(iters, sat_add(per_iter, 1));
      case PipeMode::Overlap:
      case PipeMode::Flatten: {
        // Flatten applies the overlap recurrence at this level; descendants
        // were already forced fully parallel above.
        std::int64_t ii = initiation_interval(l, f);
        return sat_add(per_iter, sat_mul(iters - 1, ii));
      }
    }
    return sat_mul(iters, per_iter);
  }

  std::int64_t initiation_interval(const LoopNode& l, std::int64_t f) const {
    std::int64_t accesses = 0;
    std::int64_t min_ports = 0;
    for (const std::string& a : l.accesses) {
      auto reg = dv.reg_array.find(a);
      if (reg != dv.reg_array.end() && reg->second) continue;  // registers have no port limit
      ++accesses;
      auto spec = kernel.arrays.find(a);
      std::int64_t ports = spec == kernel.arrays.end() ? 1 : spec->second.ports;
      min_ports = min_ports == 0 ? ports : std::min(min_ports, ports);
    }
    std::int64_t ii = 1;
    if (accesses > 0) ii = std::max<std::int64_t>(1, ceil_div(sat_mul(f, accesses), min_ports));
    // Unpartitioned arrays serialize the requests their banks would have
    // spread out.
    for (const std::string& a : unique_accesses(l)) {
      auto off = dv.partition_off.find(a);
      if (off == dv.partition_off.end() || !off->second) continue;
      auto reg = dv.reg_array.find(a);
      if (reg != dv.reg_array.end() && reg->second) continue;
      auto need = banks_needed.find(a);
      if (need != banks_needed.end()) ii = sat_mul(ii, need->second);
    }
    return ii;
  }
};

}  // namespace

const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::Timeout: return "timeout";
    case EvalStatus::Invalid: return "invalid";
  }
  return "?";
}

EvalStatus eval_status_from_string(const std::string& s) {
  if (s == "ok") return EvalStatus::Ok;
  if (s == "timeout") return EvalStatus::Timeout;
  if (s == "invalid") return EvalStatus::Invalid;
  throw Error("unknown eval status '" + s + "'");
}

double EvalResult::max_util() const {
  double m = 0.0;
  for (const auto& [k, v] : util) m = std::max(m, v);
  return m;
}

int EvalResult::violated_resources() const {
  int n = 0;
  for (const auto& [k, v] : util)
    if (v > kUtilizationCap) ++n;
  return n;
}

void finalize_feasibility(EvalResult& r) {
  r.feasible = r.status == EvalStatus::Ok && r.violated_resources() == 0;
  if (r.status != EvalStatus::Ok) {
    r.latency.reset();
    r.util.clear();
  }
}

nlohmann::json EvalResult::to_json() const {
  nlohmann::json j;
  j["status"] = to_string(status);
  j["feasible"] = feasible;
  j["source"] = source;
  if (status == EvalStatus::Ok) {
    j["latency"] = *latency;
    j["util"] = util;
  }
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

EvalResult EvalResult::from_json(const nlohmann::json& j) {
  EvalResult r;
  r.status = eval_status_from_string(j.at("status").get<std::string>());
  r.feasible = j.at("feasible").get<bool>();
  r.source = j.value("source", "surrogate");
  r.diagnostic = j.value("diagnostic", "");
  if (j.contains("latency")) r.latency = j.at("latency").get<std::int64_t>();
  if (j.contains("util")) r.util = j.at("util").get<std::map<std::string, double>>();
  return r;
}

void ResourceBudget::validate() const {
  for (const auto& [k, v] : totals)
    if (v <= 0) throw ConfigError("resource budget: " + k + " total must be positive");
  if (synth_cost_limit <= 0) throw ConfigError("resource budget: synth_cost_limit must be positive");
}

ResourceBudget ResourceBudget::from_json(const nlohmann::json& j) {
  ResourceBudget b;
  for (const auto& k : resource_kinds())
    if (j.contains(k)) b.totals[k] = j.at(k).get<std::int64_t>();
  if (j.contains("synth_cost_limit")) b.synth_cost_limit = j.at("synth_cost_limit").get<std::int64_t>();
  b.validate();
  return b;
}

nlohmann::json ResourceBudget::to_json() const {
  nlohmann::json j = totals;
  j["synth_cost_limit"] = synth_cost_limit;
  return j;
}

EvalResult surrogate_evaluate(const KernelModel& kernel, const DesignSpace& space,
                              const DesignPoint& point, const ResourceBudget& budget,
                              const SurrogateOptions& opts) {
  space.validate(point);
  DirectiveView dv = collect_directives(kernel, space, point);
  Model model{kernel, dv, opts, {}, {}, 0, 0};
  for (const LoopNode& root : kernel.loops) model.collect(root, 1, false);

  EvalResult r;
  r.source = "surrogate";
  if (model.synth_cost > budget.synth_cost_limit) {
    r.status = EvalStatus::Timeout;
    finalize_feasibility(r);
    return r;
  }

  std::int64_t total_latency = 0;
  for (const LoopNode& root : kernel.loops)
    total_latency = sat_add(total_latency, model.latency(root, false));

  std::int64_t bram = 0;
  std::int64_t bank_count = 0;
  std::int64_t reg_luts = 0;
  for (const auto& [name, spec] : kernel.arrays) {
    std::int64_t div = 1;
    if (auto it = model.tile_div.find(name); it != model.tile_div.end()) div = it->second;
    std::int64_t footprint = ceil_div(std::max<std::int64_t>(spec.size, 1), div);
    auto reg = dv.reg_array.find(name);
    if (reg != dv.reg_array.end() && reg->second) {
      reg_luts = sat_add(reg_luts, footprint);  // distributed storage
      continue;
    }
    std::int64_t need = 1;
    if (auto it = model.banks_needed.find(name); it != model.banks_needed.end()) need = it->second;
    auto off = dv.partition_off.find(name);
    std::int64_t banks = (off != dv.partition_off.end() && off->second) ? 1 : need;
    bank_count = sat_add(bank_count, banks);
    bram = sat_add(bram, sat_mul(banks, ceil_div(footprint, opts.bram_depth)));
  }

  std::int64_t lut = sat_add(sat_add(sat_mul(opts.lut_per_dsp_op, model.dsp),
                                     sat_mul(opts.lut_per_bank, bank_count)),
                             reg_luts);
  std::int64_t ff = (lut + 1) / 2;

  r.status = EvalStatus::Ok;
  r.latency = total_latency;
  auto frac = [&](const std::string& k, std::int64_t amount) {
    auto it = budget.totals.find(k);
    std::int64_t total = it == budget.totals.end() ? 1 : it->second;
    r.util[k] = static_cast<double>(amount) / static_cast<double>(total);
  };
  frac("LUT", lut);
  frac("FF", ff);
  frac("DSP", model.dsp);
  frac("BRAM", bram);
  frac("URAM", 0);
  finalize_feasibility(r);
  return r;
}

EvalResult SurrogateEvaluator::evaluate(const DesignSpace& space, const DesignPoint& point) {
  return surrogate_evaluate(space.kernel(), space, point, budget_, opts_);
}

}  // namespace pragtune
