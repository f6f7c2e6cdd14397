#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pragtune {

// Chat-message wire protocol. Field names are fixed: the canned-response
// store and remote providers share the same shapes.
struct ChatMessage {
  std::string role;  // system | user
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;

  nlohmann::json to_json() const;
  // Canonical serialization; the canned store keys on its hash.
  std::string canonical() const { return to_json().dump(); }
};

struct ChatUsage {
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

struct ChatResponse {
  std::string content;
  ChatUsage usage;

  static ChatResponse from_json(const nlohmann::json& j);
  static nlohmann::json make_json(const std::string& content,
                                  std::optional<std::int64_t> prompt_tokens,
                                  std::optional<std::int64_t> completion_tokens);
};

// One request/response exchange. Implementations must be safe for concurrent
// use or internally serialized.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;

  // Fixture-recording hook; only the canned transport implements it.
  virtual bool recording() const { return false; }
  virtual void record(const ChatRequest&, const std::string& /*content*/) {}
};

// Real network client for an OpenAI-style chat endpoint. The API key is read
// from the named environment variable at send time and never logged.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key_env, int timeout_seconds = 120);
  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  std::string endpoint_;
  std::string api_key_env_;
  int timeout_seconds_;
};

// Replays byte-identical responses keyed by the request hash. A miss is a
// TransportError. In record mode, misses can be filled in via record(), which
// writes a response file with an estimated usage block.
class CannedTransport final : public Transport {
 public:
  explicit CannedTransport(std::string store_dir, bool record_misses = false);
  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "canned"; }
  bool recording() const override { return record_misses_; }
  void record(const ChatRequest& request, const std::string& content) override;

  std::string key_for(const ChatRequest& request) const;

 private:
  std::string dir_;
  bool record_misses_;
  std::mutex mu_;
};

// Token estimate used when provider metadata is absent: ceil(chars / 4).
std::int64_t estimate_tokens(const std::string& text);
std::int64_t estimate_tokens(const ChatRequest& request);

}  // namespace pragtune
