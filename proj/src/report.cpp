#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "pragtune/eval.hpp"

namespace pragtune {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// "<float>%" with optional surrounding whitespace.
std::optional<double> parse_percent(std::string_view s) {
  s = trim(s);
  if (s.empty() || s.back() != '%') return std::nullopt;
  s.remove_suffix(1);
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

void for_each_line(const std::string& text, const std::function<void(std::string_view)>& fn) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string::npos ? text.size() : nl;
    fn(std::string_view(text).substr(pos, end - pos));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

EvalResult parse_report(const std::string& report_text, const std::string& log_text) {
  EvalResult r;
  r.source = "report";

  bool timeout = false;
  std::string error_msg;
  std::optional<std::int64_t> cycles;
  std::map<std::string, double> util;

  for_each_line(report_text, [&](std::string_view raw) {
    std::string_view line = trim(raw);
    if (line == "status: TIMEOUT") {
      timeout = true;
      return;
    }
    if (line.substr(0, 6) == "ERROR:") {
      if (error_msg.empty()) error_msg = std::string(trim(line.substr(6)));
      if (error_msg.empty()) error_msg = "unspecified toolchain error";
      return;
    }
    if (line.substr(0, 7) == "cycles:") {
      if (!cycles) cycles = parse_int(line.substr(7));
      return;
    }
    if (line.substr(0, 5) == "util.") {
      std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) return;
      std::string res(trim(line.substr(5, colon - 5)));
      for (const auto& k : resource_kinds())
        if (res == k) {
          auto pct = parse_percent(line.substr(colon + 1));
          if (pct && !util.count(res)) util[res] = *pct / 100.0;
          return;
        }
      return;
    }
  });

  for_each_line(log_text, [&](std::string_view raw) {
    std::string_view line = trim(raw);
    if (line.substr(0, 7) == "WARNING") r.warnings.emplace_back(line);
  });

  if (timeout) {
    r.status = EvalStatus::Timeout;
  } else if (!error_msg.empty()) {
    r.status = EvalStatus::Invalid;
    r.diagnostic = error_msg;
  } else if (cycles && util.size() == resource_kinds().size()) {
    r.status = EvalStatus::Ok;
    r.latency = cycles;
    r.util = std::move(util);
  } else {
    r.status = EvalStatus::Invalid;
    r.diagnostic = cycles ? "report is missing utilization figures" : "report has no cycle count";
  }
  finalize_feasibility(r);
  return r;
}

namespace {

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = tmpl.find(key, pos)) != std::string::npos) {
    tmpl.replace(pos, key.size(), value);
    pos += value.size();
  }
  return tmpl;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvalResult invalid_result(const std::string& diagnostic) {
  EvalResult r;
  r.source = "report";
  r.status = EvalStatus::Invalid;
  r.diagnostic = diagnostic;
  finalize_feasibility(r);
  return r;
}

}  // namespace

EvalResult AdapterEvaluator::evaluate(const DesignSpace& space, const DesignPoint& point) {
  namespace fs = std::filesystem;
  try {
    fs::path out_dir = fs::path(cfg_.workdir) / ("eval-" + point.id);
    fs::create_directories(out_dir);
    fs::path src = out_dir / cfg_.source_file;
    {
      std::ofstream o(src, std::ios::binary);
      o << render(space, point);
    }
    std::string cmd = substitute(cfg_.command, "{src}", src.string());
    cmd = substitute(cmd, "{out}", out_dir.string());
    int rc = std::system(cmd.c_str());

    fs::path report_path = out_dir / cfg_.report_file;
    if (!fs::exists(report_path)) {
      if (rc != 0) return invalid_result("adapter command failed (exit " + std::to_string(rc) +
                                         ") and produced no report");
      return invalid_result("adapter produced no report at " + report_path.string());
    }
    return parse_report(slurp(report_path), slurp(out_dir / cfg_.log_file));
  } catch (const std::exception& e) {
    // AdapterSpawnFailure and filesystem trouble surface as Invalid so the
    // explorer keeps running.
    return invalid_result(std::string("adapter spawn failure: ") + e.what());
  }
}

}  // namespace pragtune
