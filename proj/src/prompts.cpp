#include "pragtune/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pragtune/errors.hpp"

namespace pragtune {

namespace {

const char* kRouterTmpl = R"(You select the next designs to optimize in a directive tuning search.

Kernel source:
{code}

Explored designs (curated):
{history}

Critic feedback:
{feedback}

Tuning knowledge:
{knowledge}

Orientation: {orientation}. Pick the design with the most optimization
potential for this orientation. Reply with one fenced block:

```
task: <node id>
rationale: <one line>
```
)";

const char* kSpecialistTmpl = R"(You tune one directive parameter of a hardware kernel.

Kernel source:
{code}

Assigned design (node {task_node}): {task_point}
Task rationale: {task_rationale}
Orientation: {orientation}

Parameter: {param} (kind {param_kind}, attached to {attach})
Current value: {current}
Legal alternatives: {alternatives}

Explored designs:
{history}

Critic feedback:
{feedback}

Tuning knowledge:
{knowledge}

Propose exactly one new value for {param}; jumps beyond the adjacent value
are allowed. Reply with one fenced block:

```
param: {param}
value: <new value>
prediction: <expected effect, one line>
```
)";

const char* kArbitratorTmpl = R"(You select which proposed directive updates are worth evaluating.

Proposals:
{proposals}

Exploration budget: {evals_used}/{evals_max} evaluations used (phase {phase}).

Tuning knowledge:
{knowledge}

Predict each proposal's effect and pick at most {batch_size} proposals that
most accelerate convergence. Be aggressive early and conservative late; near
the end of the budget avoid updates that risk synthesis timeouts. Reply with
one fenced block listing the chosen proposal indices:

```
select: <comma-separated indices, or 'none'>
```
)";

const char* kCriticTmpl = R"(You judge whether a directive change improved a hardware design.

Parent design (node {parent_node}): {parent_point}
Parent result: {parent_result}

Child design (node {child_node}): {child_point}
Child result: {child_result}
Changed parameter: {changed_param}
Toolchain warnings:
{warnings}

The two designs differ in exactly one directive. Judge the child against the
parent and decide whether this branch should be pruned. Reply with one fenced
block:

```
judgment: better|worse|neutral
prune: true|false
message: <one-paragraph summary for the router and specialists>
```
)";

const char* kMerlinKnowledge =
    R"(PARALLEL FACTOR=n replicates a loop body n times; latency drops roughly by n
until memory ports or resources saturate. PIPELINE cg overlaps outer-loop
iterations (with double-buffered off-chip transfers); PIPELINE fg flattens the
loop and fully parallelizes everything beneath it, which multiplies DSP/BRAM
demand sharply. TILE FACTOR=n shrinks on-chip buffers and mainly relieves
BRAM pressure or synthesis timeouts. Utilization above 80% of any resource is
infeasible; aggressive factor combinations can time out in synthesis.)";

const char* kVitisKnowledge =
    R"(PARALLEL FACTOR=n unrolls a loop n times. PIPELINE is automatic (mode auto):
the tool pipelines on-chip modules itself, so tuning focuses on unroll
factors. There is no TILE directive. Utilization above 80% of any resource is
infeasible; aggressive unrolling can time out in synthesis.)";

const char* kStratusKnowledge =
    R"(PARALLEL FACTOR=n replicates the loop body for the ASIC flow. PIPELINE hs
overlaps iterations; PIPELINE ss adds a handshake cycle per iteration and
runs them back to back. ARRAY_PARTITION separate splits an array into one
bank per parallel consumer, off serializes accesses through a single bank.
ARRAY_TYPE mem keeps an array in SRAM; reg moves it into registers, trading
LUT/FF for memory ports. Utilization above 80% is infeasible.)";

std::string read_if_exists(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.templates_ = {{"router", kRouterTmpl},
                    {"specialist", kSpecialistTmpl},
                    {"arbitrator", kArbitratorTmpl},
                    {"critic", kCriticTmpl}};
  lib.knowledge_ = {{"merlin", kMerlinKnowledge},
                    {"vitis", kVitisKnowledge},
                    {"stratus", kStratusKnowledge}};
  return lib;
}

PromptLibrary PromptLibrary::load(const std::string& dir) {
  PromptLibrary lib = builtin();
  if (dir.empty()) return lib;
  namespace fs = std::filesystem;
  for (auto& [role, text] : lib.templates_) {
    std::string file = read_if_exists(fs::path(dir) / (role + ".txt"));
    if (!file.empty()) text = file;
  }
  for (auto& [backend, text] : lib.knowledge_) {
    std::string file = read_if_exists(fs::path(dir) / "knowledge" / (backend + ".txt"));
    if (!file.empty()) text = file;
  }
  return lib;
}

const std::string& PromptLibrary::role_template(const std::string& role) const {
  auto it = templates_.find(role);
  if (it == templates_.end()) throw Error("no prompt template for role '" + role + "'");
  return it->second;
}

const std::string& PromptLibrary::knowledge(const std::string& backend) const {
  auto it = knowledge_.find(backend);
  if (it == knowledge_.end()) throw Error("no knowledge snippet for backend '" + backend + "'");
  return it->second;
}

std::string PromptLibrary::render(const std::string& tmpl,
                                  const std::map<std::string, std::string>& fields) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    std::size_t close = tmpl.find('}', open);
    if (close == std::string::npos) {
      out.append(tmpl, open, std::string::npos);
      break;
    }
    std::string key = tmpl.substr(open + 1, close - open - 1);
    auto it = fields.find(key);
    if (it != fields.end()) {
      out += it->second;
      pos = close + 1;
    } else {
      out += '{';
      pos = open + 1;
    }
  }
  return out;
}

}  // namespace pragtune
