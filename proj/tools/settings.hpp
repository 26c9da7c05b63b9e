#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace logkg::cli {

/// Everything `ingest` can be configured with. Layers, lowest first: built-in
/// defaults, the --config file, LOGKG_* environment variables, command-line flags.
struct IngestSettings {
  std::string mode = "ontologx";
  std::string backend = "scripted";
  double temperature = 0.7;
  int max_correction_rounds = 3;
  int k = 4;
  double lambda = 0.5;
  int fetch_pool = 20;
  int transport_retries = 2;
  int retry_base_delay_ms = 500;
  bool grow_index = false;
  std::string retrieval = "manual";  // manual | any
  std::string schema;                // empty: built-in ontology
  std::string examples;
  std::string store;
  std::string script;                // JSON-lines responses for the scripted backend
  std::string base_iri = "http://example.org/logkg/";
  std::string run_id;                // empty: derived from config and inputs
  std::string http_endpoint;
  std::string http_path = "/v1/chat/completions";
  std::string http_model;
  int http_timeout_ms = 120000;
  std::string embedder = "hashing";  // hashing | http
  int embedding_dim = 256;
  std::string embed_endpoint;
  std::string embed_path = "/v1/embeddings";
  std::string embed_model;

  /// Never read from files or flags; only LOGKG_API_KEY.
  std::string api_key;
};

/// Settings as a flat JSON object (api_key excluded). Also the config-file format.
nlohmann::ordered_json settings_to_json(const IngestSettings& s);

/// Overlays the keys present in `layer` onto `s`. Throws ConfigError on unknown
/// keys, type mismatches, or credentials.
void apply_json_layer(IngestSettings& s, const nlohmann::json& layer, const std::string& origin);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads LOGKG_<UPPER_KEY> for every setting key, plus LOGKG_API_KEY.
void apply_env_layer(IngestSettings& s, const EnvLookup& env);

std::optional<std::string> process_env(const std::string& name);

/// Throws ConfigError when a value is out of range or names an unknown choice.
void check_settings(const IngestSettings& s);

}  // namespace logkg::cli
