#include "logkg/gateway.hpp"

#include <thread>

#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"
#include "logkg/text.hpp"

namespace logkg {

std::string_view to_string(GenerationMode mode) {
  return mode == GenerationMode::kGuided ? "ontologx" : "baseline";
}

GenerationMode generation_mode_from_string(std::string_view s) {
  if (s == "ontologx") return GenerationMode::kGuided;
  if (s == "baseline") return GenerationMode::kBaseline;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected ontologx or baseline)");
}

void GenerationConfig::check() const {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (max_correction_rounds < 0) throw ConfigError("max correction rounds must be >= 0");
  if (transport_retries < 0) throw ConfigError("transport retries must be >= 0");
  if (backend_id.empty()) throw ConfigError("backend id is empty");
}

std::optional<std::string_view> extract_first_json_object(std::string_view text) {
  const auto start = text.find('{');
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

BackendResponse parse_backend_output(std::string raw_text, GenerationMode mode) {
  BackendResponse response;
  response.raw_text = text::sanitize_utf8(raw_text);

  std::string_view candidate = response.raw_text;
  if (mode == GenerationMode::kBaseline) {
    const auto object = extract_first_json_object(response.raw_text);
    if (!object) {
      response.parse_errors.push_back("no JSON object found in the response");
      return response;
    }
    candidate = *object;
  }
  auto parsed = parse_graph(candidate);
  response.parsed = std::move(parsed.graph);
  response.parse_errors = std::move(parsed.errors);
  return response;
}

LlmGateway::LlmGateway(const BackendRegistry& backends, const OntologySchema& schema, Sleeper sleeper)
    : backends_(backends), output_schema_(graph_output_schema(&schema)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

BackendResponse LlmGateway::generate(std::span<const PromptMessage> messages,
                                     const GenerationConfig& cfg) const {
  GenerationBackend& backend = backends_.get(cfg.backend_id);
  BackendRequest request;
  request.messages = messages;
  request.temperature = cfg.temperature;
  request.output_schema = cfg.mode == GenerationMode::kGuided ? &output_schema_ : nullptr;

  std::chrono::milliseconds delay = cfg.retry_base_delay;
  for (int attempt = 0;; ++attempt) {
    try {
      return parse_backend_output(backend.complete(request), cfg.mode);
    } catch (const TransportError&) {
      if (attempt >= cfg.transport_retries) throw;
    }
    sleeper_(delay);
    delay *= 2;
  }
}

}  // namespace logkg
