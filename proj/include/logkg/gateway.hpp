#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logkg/backend.hpp"
#include "logkg/model.hpp"
#include "logkg/prompts.hpp"
#include "logkg/schema.hpp"

namespace logkg {

/// kGuided: retrieval, structured output and corrections. kBaseline: one
/// prompt-only call with free-text JSON.
enum class GenerationMode { kGuided, kBaseline };

/// "ontologx" or "baseline".
std::string_view to_string(GenerationMode mode);
GenerationMode generation_mode_from_string(std::string_view s);

struct GenerationConfig {
  double temperature = 0.7;
  int max_correction_rounds = 3;
  GenerationMode mode = GenerationMode::kGuided;
  std::string backend_id = "scripted";
  int transport_retries = 2;
  std::chrono::milliseconds retry_base_delay{500};

  void check() const;
};

struct BackendResponse {
  std::string raw_text;
  std::optional<KnowledgeGraph> parsed;
  std::vector<std::string> parse_errors;
};

/// Substring holding the first brace-balanced JSON object (strings and escapes
/// respected), or nullopt if no object closes.
std::optional<std::string_view> extract_first_json_object(std::string_view text);

/// Guided mode expects the whole output to be one JSON document; baseline mode
/// parses the first balanced object found in free text. No repair is attempted.
BackendResponse parse_backend_output(std::string raw_text, GenerationMode mode);

class LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LlmGateway(const BackendRegistry& backends, const OntologySchema& schema, Sleeper sleeper = {});

  /// Calls the configured backend, retrying transport errors up to
  /// cfg.transport_retries times with exponential backoff. The last transport
  /// error is rethrown when retries run out.
  BackendResponse generate(std::span<const PromptMessage> messages, const GenerationConfig& cfg) const;

  /// Structured-output contract used in guided mode.
  const nlohmann::json& output_schema() const { return output_schema_; }

 private:
  const BackendRegistry& backends_;
  nlohmann::json output_schema_;
  Sleeper sleeper_;
};

}  // namespace logkg
