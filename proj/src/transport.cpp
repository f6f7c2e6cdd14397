#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "pragtune/wire.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pragtune/errors.hpp"
#include "pragtune/hash.hpp"

namespace pragtune {

nlohmann::json ChatRequest::to_json() const {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return nlohmann::json{{"model", model}, {"messages", msgs}, {"temperature", temperature}};
}

ChatResponse ChatResponse::from_json(const nlohmann::json& j) {
  ChatResponse r;
  try {
    r.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
  if (j.contains("usage")) {
    const auto& u = j.at("usage");
    if (u.contains("prompt_tokens")) r.usage.prompt_tokens = u.at("prompt_tokens").get<std::int64_t>();
    if (u.contains("completion_tokens"))
      r.usage.completion_tokens = u.at("completion_tokens").get<std::int64_t>();
  }
  return r;
}

nlohmann::json ChatResponse::make_json(const std::string& content,
                                       std::optional<std::int64_t> prompt_tokens,
                                       std::optional<std::int64_t> completion_tokens) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array(
      {nlohmann::json{{"message", {{"role", "assistant"}, {"content", content}}}}});
  nlohmann::json usage;
  if (prompt_tokens) usage["prompt_tokens"] = *prompt_tokens;
  if (completion_tokens) usage["completion_tokens"] = *completion_tokens;
  if (!usage.empty()) j["usage"] = usage;
  return j;
}

std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::int64_t estimate_tokens(const ChatRequest& request) {
  std::int64_t n = 0;
  for (const auto& m : request.messages) n += estimate_tokens(m.content);
  return n;
}

HttpTransport::HttpTransport(std::string endpoint, std::string api_key_env, int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      api_key_env_(std::move(api_key_env)),
      timeout_seconds_(timeout_seconds) {}

ChatResponse HttpTransport::send(const ChatRequest& request) {
  // Split "scheme://host[:port]/path".
  std::size_t scheme_end = endpoint_.find("://");
  if (scheme_end == std::string::npos)
    throw TransportError("endpoint '" + endpoint_ + "' has no scheme");
  std::size_t path_begin = endpoint_.find('/', scheme_end + 3);
  std::string origin =
      path_begin == std::string::npos ? endpoint_ : endpoint_.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? "/" : endpoint_.substr(path_begin);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);

  httplib::Headers headers;
  if (!api_key_env_.empty()) {
    const char* key = std::getenv(api_key_env_.c_str());
    if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(path, headers, request.canonical(), "application/json");
  if (!res)
    throw TransportError("request to " + endpoint_ + " failed: " +
                         httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError("request to " + endpoint_ + " returned HTTP " +
                         std::to_string(res->status));
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("response is not JSON: ") + e.what());
  }
  return ChatResponse::from_json(body);
}

CannedTransport::CannedTransport(std::string store_dir, bool record_misses)
    : dir_(std::move(store_dir)), record_misses_(record_misses) {}

std::string CannedTransport::key_for(const ChatRequest& request) const {
  return content_hash(request.canonical());
}

ChatResponse CannedTransport::send(const ChatRequest& request) {
  std::filesystem::path file = std::filesystem::path(dir_) / (key_for(request) + ".json");
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw TransportError("canned store has no response for request " + key_for(request));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("canned response " + file.string() + ": " + e.what());
  }
  return ChatResponse::from_json(j);
}

void CannedTransport::record(const ChatRequest& request, const std::string& content) {
  std::lock_guard<std::mutex> lock(mu_);
  std::filesystem::create_directories(dir_);
  std::filesystem::path file = std::filesystem::path(dir_) / (key_for(request) + ".json");
  if (std::filesystem::exists(file)) return;
  nlohmann::json j =
      ChatResponse::make_json(content, estimate_tokens(request), estimate_tokens(content));
  std::ofstream out(file, std::ios::binary);
  out << j.dump(2) << '\n';
}

}  // namespace pragtune
