#include "pragtune/kernel_model.hpp"

#include <fstream>
#include <functional>

#include "pragtune/errors.hpp"

namespace pragtune {

namespace {

LoopNode loop_from_json(const nlohmann::json& j) {
  LoopNode n;
  n.id = j.at("id").get<std::string>();
  n.trip_count = j.at("trip_count").get<std::int64_t>();
  n.body_cost = j.value("body_cost", std::int64_t{0});
  n.body_dsp = j.value("body_dsp", std::int64_t{0});
  if (j.contains("accesses")) n.accesses = j.at("accesses").get<std::vector<std::string>>();
  if (n.trip_count < 1)
    throw SpaceFormatError("kernel model: loop '" + n.id + "' has trip_count < 1");
  if (n.body_cost < 0 || n.body_dsp < 0)
    throw SpaceFormatError("kernel model: loop '" + n.id + "' has negative body figures");
  if (j.contains("children"))
    for (const auto& c : j.at("children")) n.children.push_back(loop_from_json(c));
  return n;
}

}  // namespace

int KernelModel::loop_depth(const std::string& id) const {
  int found = -1;
  std::function<void(const LoopNode&, int)> walk = [&](const LoopNode& n, int depth) {
    if (n.id == id) found = depth;
    for (const auto& c : n.children) walk(c, depth + 1);
  };
  for (const auto& root : loops) walk(root, 0);
  return found;
}

bool KernelModel::has_loop(const std::string& id) const { return loop_depth(id) >= 0; }

KernelModel KernelModel::from_json(const nlohmann::json& j) {
  KernelModel m;
  for (const auto& l : j.at("loops")) m.loops.push_back(loop_from_json(l));
  if (j.contains("arrays")) {
    for (const auto& [name, spec] : j.at("arrays").items()) {
      ArraySpec a;
      a.size = spec.at("size").get<std::int64_t>();
      a.ports = spec.value("ports", 1);
      if (a.ports < 1)
        throw SpaceFormatError("kernel model: array '" + name + "' has ports < 1");
      if (a.size < 0) throw SpaceFormatError("kernel model: array '" + name + "' has size < 0");
      m.arrays[name] = a;
    }
  }
  return m;
}

KernelModel KernelModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpaceFormatError("kernel model: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpaceFormatError("kernel model " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace pragtune
