#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/prompts.hpp"

namespace logkg {

struct BackendRequest {
  std::span<const PromptMessage> messages;
  double temperature = 0.7;
  /// JSON Schema the output must follow, passed as a forced function call.
  /// Null for plain-text generation.
  const nlohmann::json* output_schema = nullptr;
};

/// A chat model. complete() returns the raw model output: the function-call
/// arguments when an output schema is given, the message text otherwise.
/// Transport problems are thrown as BackendUnavailable, Timeout or RateLimited.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string complete(const BackendRequest& request) = 0;
};

enum class ScriptedFailure { kUnavailable, kTimeout, kRateLimited };

struct ScriptedResponse {
  std::string text;
  std::optional<ScriptedFailure> failure;  // when set, the call throws instead

  static ScriptedResponse ok(std::string text) { return {std::move(text), std::nullopt}; }
  static ScriptedResponse fail(ScriptedFailure f) { return {{}, f}; }
};

/// Deterministic mock: replays a queue of canned responses and records every call.
class ScriptedBackend final : public GenerationBackend {
 public:
  struct Call {
    Conversation messages;
    double temperature = 0.0;
    bool structured = false;
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<ScriptedResponse> script);

  void push(ScriptedResponse response);
  std::string complete(const BackendRequest& request) override;

  std::size_t call_count() const;
  std::vector<Call> calls() const;
  std::size_t remaining() const;

  /// Script file: JSON-lines, one response per line, as {"text": "..."},
  /// {"graph": {...}} or {"error": "unavailable"|"timeout"|"rate_limited"}.
  static std::vector<ScriptedResponse> load_script(const std::filesystem::path& path);

 private:
  mutable std::mutex mutex_;
  std::deque<ScriptedResponse> queue_;
  std::vector<Call> calls_;
};

struct HttpBackendConfig {
  std::string endpoint;  // base URL, e.g. https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{120000};
};

/// Generic OpenAI-style chat-completions client. Structured output is requested as
/// a single forced tool call whose parameters are the output schema.
class HttpChatBackend final : public GenerationBackend {
 public:
  static constexpr const char* kToolName = "emit_knowledge_graph";

  explicit HttpChatBackend(HttpBackendConfig config);
  std::string complete(const BackendRequest& request) override;

  /// Request body for the given request; exposed for tests.
  nlohmann::json request_body(const BackendRequest& request) const;
  /// Extracts the tool-call arguments or message content from a response body.
  static std::string extract_output(const nlohmann::json& response, bool structured);

 private:
  HttpBackendConfig config_;
};

/// Named backends available to a pipeline.
class BackendRegistry {
 public:
  void add(std::string id, std::shared_ptr<GenerationBackend> backend);
  bool contains(const std::string& id) const;
  /// Throws ConfigError for an unknown id.
  GenerationBackend& get(const std::string& id) const;

 private:
  std::map<std::string, std::shared_ptr<GenerationBackend>> backends_;
};

}  // namespace logkg
