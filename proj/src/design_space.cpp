#include "pragtune/design_space.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pragtune/errors.hpp"
#include "pragtune/hash.hpp"

namespace pragtune {

namespace {

constexpr std::string_view kPlaceholderHead = "auto{";

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpaceFormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string normalize_newlines(std::string s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (c != '\r') out.push_back(c);
  return out;
}

// Placeholder occurrences in template order.
struct PlaceholderScan {
  struct Slot {
    std::string name;
    std::size_t begin;  // offset of "auto{"
    std::size_t end;    // one past "}"
  };
  std::vector<Slot> slots;
};

PlaceholderScan scan_placeholders(const std::string& tmpl) {
  PlaceholderScan scan;
  std::size_t pos = 0;
  while ((pos = tmpl.find(kPlaceholderHead, pos)) != std::string::npos) {
    std::size_t name_begin = pos + kPlaceholderHead.size();
    std::size_t close = tmpl.find('}', name_begin);
    if (close == std::string::npos)
      throw MissingPlaceholder("kernel template: unterminated placeholder at offset " +
                               std::to_string(pos));
    scan.slots.push_back({tmpl.substr(name_begin, close - name_begin), pos, close + 1});
    pos = close + 1;
  }
  return scan;
}

void check_domain_typing(const ParamDef& p, const BackendProfile& profile) {
  bool want_int = p.is_factor();
  for (const Value& v : p.domain) {
    if (v.is_int() != want_int)
      throw SpaceFormatError("param '" + p.name + "': " + to_string(p.kind) + " domain must hold " +
                             (want_int ? "integers" : "mode tokens"));
    if (want_int && v.as_int() < 1)
      throw SpaceFormatError("param '" + p.name + "': factors must be >= 1");
  }
  if (p.kind == ParamKind::Pipeline) {
    for (const Value& v : p.domain)
      if (std::find(profile.pipeline_vocab.begin(), profile.pipeline_vocab.end(),
                    v.as_token()) == profile.pipeline_vocab.end())
        throw SpaceFormatError("param '" + p.name + "': pipeline mode '" + v.as_token() +
                               "' is not in the " + profile.name + " vocabulary");
  }
  if (p.kind == ParamKind::ArrayPartition) {
    for (const Value& v : p.domain)
      if (v.as_token() != "separate" && v.as_token() != "off")
        throw SpaceFormatError("param '" + p.name + "': array partition mode must be separate|off");
  }
  if (p.kind == ParamKind::ArrayType) {
    for (const Value& v : p.domain)
      if (v.as_token() != "mem" && v.as_token() != "reg")
        throw SpaceFormatError("param '" + p.name + "': array type must be mem|reg");
  }
}

}  // namespace

const char* to_string(ParamKind k) {
  switch (k) {
    case ParamKind::Parallel: return "PARALLEL";
    case ParamKind::Pipeline: return "PIPELINE";
    case ParamKind::Tile: return "TILE";
    case ParamKind::ArrayPartition: return "ARRAY_PARTITION";
    case ParamKind::ArrayType: return "ARRAY_TYPE";
  }
  return "?";
}

ParamKind param_kind_from_string(const std::string& s) {
  if (s == "PARALLEL") return ParamKind::Parallel;
  if (s == "PIPELINE") return ParamKind::Pipeline;
  if (s == "TILE") return ParamKind::Tile;
  if (s == "ARRAY_PARTITION") return ParamKind::ArrayPartition;
  if (s == "ARRAY_TYPE") return ParamKind::ArrayType;
  throw SpaceFormatError("unknown parameter kind '" + s + "'");
}

int ParamDef::domain_index(const Value& v) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == v) return static_cast<int>(i);
  return -1;
}

BackendProfile BackendProfile::merlin() {
  return {"merlin",
          {ParamKind::Parallel, ParamKind::Pipeline, ParamKind::Tile},
          {"off", "cg", "fg"},
          true};
}

BackendProfile BackendProfile::vitis() {
  return {"vitis", {ParamKind::Parallel, ParamKind::Pipeline}, {"auto"}, false};
}

BackendProfile BackendProfile::stratus() {
  return {"stratus",
          {ParamKind::Parallel, ParamKind::Pipeline, ParamKind::ArrayPartition,
           ParamKind::ArrayType},
          {"off", "hs", "ss"},
          false};
}

BackendProfile BackendProfile::named(const std::string& name) {
  if (name == "merlin") return merlin();
  if (name == "vitis") return vitis();
  if (name == "stratus") return stratus();
  throw SpaceFormatError("unknown backend '" + name + "' (expected merlin|vitis|stratus)");
}

Value BackendProfile::default_value(ParamKind kind) const {
  switch (kind) {
    case ParamKind::Parallel:
    case ParamKind::Tile: return Value(1);
    case ParamKind::Pipeline: return name == "vitis" ? Value("auto") : Value("off");
    case ParamKind::ArrayPartition: return Value("off");
    case ParamKind::ArrayType: return Value("mem");
  }
  return Value(1);
}

DesignPoint DesignPoint::make(std::map<std::string, Value> assignment) {
  DesignPoint p;
  p.assignment = std::move(assignment);
  std::string canon;
  for (const auto& [name, v] : p.assignment) {
    canon += name;
    canon += '=';
    canon += v.text();
    canon += '\n';
  }
  p.id = content_hash(canon);
  return p;
}

DesignPoint DesignPoint::with(const std::string& param, const Value& v) const {
  auto a = assignment;
  a[param] = v;
  return make(std::move(a));
}

const Value& DesignPoint::at(const std::string& param) const {
  auto it = assignment.find(param);
  if (it == assignment.end()) throw UnknownParam("point has no value for '" + param + "'");
  return it->second;
}

int hamming_distance(const DesignPoint& a, const DesignPoint& b) {
  int d = 0;
  for (const auto& [name, v] : a.assignment) {
    auto it = b.assignment.find(name);
    if (it == b.assignment.end() || it->second != v) ++d;
  }
  for (const auto& [name, v] : b.assignment)
    if (!a.assignment.count(name)) ++d;
  return d;
}

DesignSpace::DesignSpace(std::vector<ParamDef> params, std::string kernel_template,
                         BackendProfile profile, KernelModel kernel)
    : params_(std::move(params)),
      template_(normalize_newlines(std::move(kernel_template))),
      profile_(std::move(profile)),
      kernel_(std::move(kernel)) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamDef& p = params_[i];
    if (index_.count(p.name)) throw DuplicateParam("duplicate parameter name '" + p.name + "'");
    index_[p.name] = i;
    if (p.domain.empty()) throw EmptyDomain("param '" + p.name + "' has an empty domain");
    if (!profile_.supported_kinds.count(p.kind))
      throw UnsupportedKindForBackend("param '" + p.name + "': kind " + to_string(p.kind) +
                                      " is not supported by the " + profile_.name + " backend");
    check_domain_typing(p, profile_);
    if (p.domain_index(profile_.default_value(p.kind)) < 0)
      throw SpaceFormatError("param '" + p.name + "': domain must contain the conservative default " +
                             profile_.default_value(p.kind).text());
  }

  // Guards can only be bound once the parameter table exists.
  for (ParamDef& p : params_)
    p.guard.bind(*this);

  // Placeholders and parameters must match one-to-one.
  PlaceholderScan scan = scan_placeholders(template_);
  std::map<std::string, int> seen;
  for (const auto& slot : scan.slots) ++seen[slot.name];
  for (const ParamDef& p : params_) {
    auto it = seen.find(p.name);
    if (it == seen.end())
      throw MissingPlaceholder("kernel template has no placeholder auto{" + p.name + "}");
    if (it->second != 1)
      throw MissingPlaceholder("kernel template placeholder auto{" + p.name + "} appears " +
                               std::to_string(it->second) + " times");
  }
  for (const auto& [name, count] : seen)
    if (!index_.count(name))
      throw MissingPlaceholder("kernel template placeholder auto{" + name +
                               "} has no parameter definition");
}

const ParamDef& DesignSpace::param(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownParam("unknown parameter '" + name + "'");
  return params_[it->second];
}

bool DesignSpace::has_param(const std::string& name) const { return index_.count(name) > 0; }

bool DesignSpace::guards_hold(const std::map<std::string, Value>& assignment) const {
  auto lookup = [&](const std::string& name) -> Value {
    auto it = assignment.find(name);
    if (it != assignment.end()) return it->second;
    return profile_.default_value(param(name).kind);
  };
  for (const ParamDef& p : params_)
    if (!p.guard.eval(lookup)) return false;
  return true;
}

void DesignSpace::validate(const DesignPoint& point) const {
  if (point.assignment.size() != params_.size())
    throw InvalidPoint("point assigns " + std::to_string(point.assignment.size()) + " of " +
                       std::to_string(params_.size()) + " parameters");
  for (const ParamDef& p : params_) {
    auto it = point.assignment.find(p.name);
    if (it == point.assignment.end()) throw InvalidPoint("point misses param '" + p.name + "'");
    if (p.domain_index(it->second) < 0)
      throw InvalidPoint("param '" + p.name + "': value " + it->second.text() +
                         " is outside the domain");
  }
  if (!guards_hold(point.assignment)) throw InvalidPoint("point violates a guard");
}

bool DesignSpace::is_valid(const DesignPoint& point) const {
  try {
    validate(point);
    return true;
  } catch (const InvalidPoint&) {
    return false;
  }
}

DesignSpace make_space(const nlohmann::json& doc, const std::string& kernel_source,
                       const std::string& base_dir) {
  try {
    BackendProfile profile = BackendProfile::named(doc.value("backend", "merlin"));

    KernelModel model;
    if (doc.contains("kernel_model")) {
      const auto& km = doc.at("kernel_model");
      if (km.is_string()) {
        std::filesystem::path p = km.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        model = KernelModel::load(p.string());
      } else {
        model = KernelModel::from_json(km);
      }
    }

    std::vector<ParamDef> params;
    for (const auto& pj : doc.at("params")) {
      ParamDef p;
      p.name = pj.at("name").get<std::string>();
      p.kind = param_kind_from_string(pj.at("kind").get<std::string>());
      p.attach = pj.value("attach", "");
      for (const auto& v : pj.at("domain")) p.domain.push_back(v.get<Value>());
      if (pj.contains("guard") && !pj.at("guard").get<std::string>().empty())
        p.guard = Guard::parse(pj.at("guard").get<std::string>());
      params.push_back(std::move(p));
    }

    return DesignSpace(std::move(params), kernel_source, std::move(profile), std::move(model));
  } catch (const nlohmann::json::exception& e) {
    throw SpaceFormatError(std::string("space document: ") + e.what());
  }
}

DesignSpace load_space(const std::string& space_file, const std::string& kernel_file) {
  nlohmann::json doc;
  {
    std::ifstream in(space_file);
    if (!in) throw SpaceFormatError("cannot open space file " + space_file);
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw SpaceFormatError("space file " + space_file + ": " + e.what());
    }
  }
  std::string kernel = read_text_file(kernel_file);
  std::string base = std::filesystem::path(space_file).parent_path().string();
  return make_space(doc, kernel, base);
}

DesignPoint default_point(const DesignSpace& space) {
  std::map<std::string, Value> a;
  for (const ParamDef& p : space.params())
    a[p.name] = space.profile().default_value(p.kind);
  DesignPoint point = DesignPoint::make(std::move(a));
  if (!space.guards_hold(point.assignment))
    throw DefaultViolatesGuard("the conservative default assignment violates a guard");
  return point;
}

std::vector<Value> legal_values(const DesignSpace& space, const DesignPoint& point,
                                const std::string& param) {
  const ParamDef& def = space.param(param);
  std::vector<Value> out;
  for (const Value& v : def.domain) {
    auto a = point.assignment;
    a[param] = v;
    if (space.guards_hold(a)) out.push_back(v);
  }
  return out;
}

std::string render(const DesignSpace& space, const DesignPoint& point) {
  space.validate(point);
  const std::string& tmpl = space.kernel_template();
  PlaceholderScan scan = scan_placeholders(tmpl);
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  for (const auto& slot : scan.slots) {
    out.append(tmpl, pos, slot.begin - pos);
    out += point.at(slot.name).text();
    pos = slot.end;
  }
  out.append(tmpl, pos, tmpl.size() - pos);
  return out;
}

DesignPoint parse_rendered(const DesignSpace& space, const std::string& source) {
  const std::string& tmpl = space.kernel_template();
  PlaceholderScan scan = scan_placeholders(tmpl);
  std::map<std::string, Value> a;
  std::size_t tpos = 0;  // template cursor
  std::size_t spos = 0;  // source cursor
  for (const auto& slot : scan.slots) {
    std::string lit = tmpl.substr(tpos, slot.begin - tpos);
    if (source.compare(spos, lit.size(), lit) != 0)
      throw InvalidPoint("rendered source does not match the kernel template near offset " +
                         std::to_string(spos));
    spos += lit.size();
    // The captured value runs until the next literal chunk.
    std::size_t lit_end = slot.end;
    std::size_t next_begin = tmpl.find(kPlaceholderHead, lit_end);
    std::string next_lit = tmpl.substr(
        lit_end, (next_begin == std::string::npos ? tmpl.size() : next_begin) - lit_end);
    std::size_t value_end = next_lit.empty() ? source.size() : source.find(next_lit, spos);
    if (value_end == std::string::npos)
      throw InvalidPoint("rendered source truncated while reading auto{" + slot.name + "}");
    std::string captured = source.substr(spos, value_end - spos);
    const ParamDef& def = space.param(slot.name);
    bool matched = false;
    for (const Value& v : def.domain)
      if (v.text() == captured) {
        a[slot.name] = v;
        matched = true;
        break;
      }
    if (!matched)
      throw InvalidPoint("param '" + slot.name + "': rendered value '" + captured +
                         "' is outside the domain");
    spos = value_end;
    tpos = slot.end;
  }
  if (source.compare(spos, std::string::npos, tmpl.substr(tpos)) != 0)
    throw InvalidPoint("rendered source tail does not match the kernel template");
  return DesignPoint::make(std::move(a));
}

std::uint64_t space_size(const DesignSpace& space) {
  std::uint64_t total = 1;
  for (const ParamDef& p : space.params()) {
    std::uint64_t n = p.domain.size();
    if (n != 0 && total > std::numeric_limits<std::uint64_t>::max() / n)
      return std::numeric_limits<std::uint64_t>::max();  // saturate
    total *= n;
  }
  return total;
}

}  // namespace pragtune
