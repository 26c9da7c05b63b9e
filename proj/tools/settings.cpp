#include "settings.hpp"

#include <cstdlib>
#include <stdexcept>

#include "logkg/errors.hpp"

namespace logkg::cli {

namespace {

enum class Kind { kString, kInt, kDouble, kBool };

// Single table driving JSON, environment and serialization so the three stay in step.
struct Field {
  const char* key;
  Kind kind;
  std::string IngestSettings::*s = nullptr;
  int IngestSettings::*i = nullptr;
  double IngestSettings::*d = nullptr;
  bool IngestSettings::*b = nullptr;
};

Field str(const char* key, std::string IngestSettings::*m) { return {key, Kind::kString, m}; }
Field integer(const char* key, int IngestSettings::*m) { return {key, Kind::kInt, nullptr, m}; }
Field real(const char* key, double IngestSettings::*m) { return {key, Kind::kDouble, nullptr, nullptr, m}; }
Field flag(const char* key, bool IngestSettings::*m) { return {key, Kind::kBool, nullptr, nullptr, nullptr, m}; }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      str("mode", &IngestSettings::mode),
      str("backend", &IngestSettings::backend),
      real("temperature", &IngestSettings::temperature),
      integer("max_correction_rounds", &IngestSettings::max_correction_rounds),
      integer("k", &IngestSettings::k),
      real("lambda", &IngestSettings::lambda),
      integer("fetch_pool", &IngestSettings::fetch_pool),
      integer("transport_retries", &IngestSettings::transport_retries),
      integer("retry_base_delay_ms", &IngestSettings::retry_base_delay_ms),
      flag("grow_index", &IngestSettings::grow_index),
      str("retrieval", &IngestSettings::retrieval),
      str("schema", &IngestSettings::schema),
      str("examples", &IngestSettings::examples),
      str("store", &IngestSettings::store),
      str("script", &IngestSettings::script),
      str("base_iri", &IngestSettings::base_iri),
      str("run_id", &IngestSettings::run_id),
      str("http_endpoint", &IngestSettings::http_endpoint),
      str("http_path", &IngestSettings::http_path),
      str("http_model", &IngestSettings::http_model),
      integer("http_timeout_ms", &IngestSettings::http_timeout_ms),
      str("embedder", &IngestSettings::embedder),
      integer("embedding_dim", &IngestSettings::embedding_dim),
      str("embed_endpoint", &IngestSettings::embed_endpoint),
      str("embed_path", &IngestSettings::embed_path),
      str("embed_model", &IngestSettings::embed_model),
  };
  return kFields;
}

std::string env_name(const std::string& key) {
  std::string out = "LOGKG_";
  for (char c : key) out += static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
  return out;
}

nlohmann::json parse_env_value(const Field& f, const std::string& raw, const std::string& name) {
  try {
    std::size_t used = 0;
    switch (f.kind) {
      case Kind::kString:
        return raw;
      case Kind::kInt: {
        const long v = std::stol(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kDouble: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kBool:
        if (raw == "1" || raw == "true") return true;
        if (raw == "0" || raw == "false") return false;
        break;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(name + ": cannot parse '" + raw + "'");
}

}  // namespace

nlohmann::ordered_json settings_to_json(const IngestSettings& s) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : fields()) {
    switch (f.kind) {
      case Kind::kString: j[f.key] = s.*f.s; break;
      case Kind::kInt: j[f.key] = s.*f.i; break;
      case Kind::kDouble: j[f.key] = s.*f.d; break;
      case Kind::kBool: j[f.key] = s.*f.b; break;
    }
  }
  return j;
}

void apply_json_layer(IngestSettings& s, const nlohmann::json& layer, const std::string& origin) {
  if (!layer.is_object()) throw ConfigError(origin + ": expected a JSON object");
  for (const auto& [key, value] : layer.items()) {
    if (key == "api_key") throw ConfigError(origin + ": credentials are read from LOGKG_API_KEY only");
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (!field) throw ConfigError(origin + ": unknown setting '" + key + "'");
    const std::string where = origin + ": " + key;
    switch (field->kind) {
      case Kind::kString:
        if (!value.is_string()) throw ConfigError(where + " must be a string");
        s.*field->s = value.get<std::string>();
        break;
      case Kind::kInt:
        if (!value.is_number_integer()) throw ConfigError(where + " must be an integer");
        s.*field->i = value.get<int>();
        break;
      case Kind::kDouble:
        if (!value.is_number()) throw ConfigError(where + " must be a number");
        s.*field->d = value.get<double>();
        break;
      case Kind::kBool:
        if (!value.is_boolean()) throw ConfigError(where + " must be true or false");
        s.*field->b = value.get<bool>();
        break;
    }
  }
}

void apply_env_layer(IngestSettings& s, const EnvLookup& env) {
  nlohmann::json layer = nlohmann::json::object();
  for (const auto& f : fields()) {
    const auto name = env_name(f.key);
    if (auto raw = env(name)) layer[f.key] = parse_env_value(f, *raw, name);
  }
  apply_json_layer(s, layer, "environment");
  if (auto key = env("LOGKG_API_KEY")) s.api_key = *key;
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

void check_settings(const IngestSettings& s) {
  if (s.mode != "ontologx" && s.mode != "baseline") {
    throw ConfigError("unknown mode '" + s.mode + "' (expected ontologx or baseline)");
  }
  if (s.backend != "scripted" && s.backend != "http") {
    throw ConfigError("unknown backend '" + s.backend + "' (expected scripted or http)");
  }
  if (s.retrieval != "manual" && s.retrieval != "any") {
    throw ConfigError("retrieval must be manual or any");
  }
  if (s.embedder != "hashing" && s.embedder != "http") {
    throw ConfigError("unknown embedder '" + s.embedder + "' (expected hashing or http)");
  }
  if (s.k < 1 || s.fetch_pool < s.k) throw ConfigError("need 1 <= k <= fetch_pool");
  if (s.embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (s.retry_base_delay_ms < 0 || s.http_timeout_ms < 1) throw ConfigError("delays and timeouts must be positive");
  if (s.backend == "scripted" && s.script.empty()) throw ConfigError("the scripted backend needs --script");
  if (s.backend == "http" && (s.http_endpoint.empty() || s.http_model.empty())) {
    throw ConfigError("the http backend needs http_endpoint and http_model");
  }
  if (s.embedder == "http" && (s.embed_endpoint.empty() || s.embed_model.empty())) {
    throw ConfigError("the http embedder needs embed_endpoint and embed_model");
  }
}

}  // namespace logkg::cli
