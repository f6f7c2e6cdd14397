#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pragtune/guard.hpp"
#include "pragtune/kernel_model.hpp"
#include "pragtune/value.hpp"

namespace pragtune {

enum class ParamKind { Parallel, Pipeline, Tile, ArrayPartition, ArrayType };

const char* to_string(ParamKind k);
ParamKind param_kind_from_string(const std::string& s);

// One tunable directive parameter.
struct ParamDef {
  std::string name;
  ParamKind kind = ParamKind::Parallel;
  std::string attach;         // loop id (Parallel/Pipeline/Tile) or array id
  std::vector<Value> domain;  // declaration order is the search order
  Guard guard;                // empty = always legal

  bool is_factor() const { return kind == ParamKind::Parallel || kind == ParamKind::Tile; }
  int domain_index(const Value& v) const;  // -1 when absent
};

// Per-toolchain parameter vocabulary.
struct BackendProfile {
  std::string name;  // merlin | vitis | stratus
  std::set<ParamKind> supported_kinds;
  std::vector<std::string> pipeline_vocab;
  bool tile_supported = false;

  static BackendProfile merlin();
  static BackendProfile vitis();
  static BackendProfile stratus();
  static BackendProfile named(const std::string& name);

  // Conservative default for a parameter kind under this backend.
  Value default_value(ParamKind kind) const;
};

// A concrete assignment over a space's parameters, identified by a content
// hash so duplicates collapse regardless of construction order.
struct DesignPoint {
  std::map<std::string, Value> assignment;
  std::string id;  // hex content hash

  static DesignPoint make(std::map<std::string, Value> assignment);
  DesignPoint with(const std::string& param, const Value& v) const;

  const Value& at(const std::string& param) const;
  friend bool operator==(const DesignPoint& a, const DesignPoint& b) {
    return a.assignment == b.assignment;
  }
};

// Number of parameters whose values differ. Assignments must cover the same
// parameter set.
int hamming_distance(const DesignPoint& a, const DesignPoint& b);

// The directive optimization space of one kernel: parameter definitions, the
// annotated source template, the backend vocabulary, and the loop-nest model
// used by the surrogate. Immutable after load.
class DesignSpace {
 public:
  DesignSpace(std::vector<ParamDef> params, std::string kernel_template, BackendProfile profile,
              KernelModel kernel);

  const std::vector<ParamDef>& params() const { return params_; }
  const ParamDef& param(const std::string& name) const;  // throws UnknownParam
  bool has_param(const std::string& name) const;
  const std::string& kernel_template() const { return template_; }
  const BackendProfile& profile() const { return profile_; }
  const KernelModel& kernel() const { return kernel_; }

  // Throws InvalidPoint when the assignment is not total, uses an
  // out-of-domain value, or violates a guard.
  void validate(const DesignPoint& point) const;
  bool is_valid(const DesignPoint& point) const;

  // Guard check over a possibly partial assignment; unset names read as
  // their conservative defaults.
  bool guards_hold(const std::map<std::string, Value>& assignment) const;

 private:
  std::vector<ParamDef> params_;
  std::map<std::string, std::size_t> index_;
  std::string template_;
  BackendProfile profile_;
  KernelModel kernel_;
};

// Parses and validates the space document plus the annotated kernel source.
DesignSpace load_space(const std::string& space_file, const std::string& kernel_file);

// In-memory variant used by tests and embedded-model space files.
DesignSpace make_space(const nlohmann::json& space_doc, const std::string& kernel_source,
                       const std::string& base_dir = "");

// The most conservative assignment: no parallelism, pipelining off (auto on
// vitis), unit tiles, partitioning off, arrays in memory.
DesignPoint default_point(const DesignSpace& space);

// Values of `param` that keep every guard satisfied after substitution into
// `point`; ordered as declared. May be empty (param frozen at this point).
std::vector<Value> legal_values(const DesignSpace& space, const DesignPoint& point,
                                const std::string& param);

// Substitutes the assignment into the kernel template. Byte-stable.
std::string render(const DesignSpace& space, const DesignPoint& point);

// Recovers the assignment from a source previously produced by render().
DesignPoint parse_rendered(const DesignSpace& space, const std::string& source);

// Guard-ignoring upper bound: the product of domain sizes. Saturates at
// uint64 max.
std::uint64_t space_size(const DesignSpace& space);

}  // namespace pragtune
