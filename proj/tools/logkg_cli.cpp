// logkg: turn log events into ontology-conformant knowledge graphs.
//
//   logkg ingest   run the extraction pipeline over log files
//   logkg validate check graph JSON files against an ontology
//   logkg eval     score predicted graphs against gold graphs
//   logkg sample   draw a diverse few-shot/validation/test split
//   logkg export   dump stored graphs as N-Triples

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "logkg/backend.hpp"
#include "logkg/digest.hpp"
#include "logkg/embedding.hpp"
#include "logkg/errors.hpp"
#include "logkg/example_index.hpp"
#include "logkg/gateway.hpp"
#include "logkg/graph_json.hpp"
#include "logkg/graph_store.hpp"
#include "logkg/metrics.hpp"
#include "logkg/ntriples.hpp"
#include "logkg/pipeline.hpp"
#include "logkg/sampler.hpp"
#include "logkg/schema.hpp"
#include "logkg/validator.hpp"
#include "settings.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kNotConforming = 1;
constexpr int kUsage = 2;
constexpr int kRuntimeFailure = 3;
constexpr int kMissingFile = 4;
constexpr int kPoolExhausted = 5;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw logkg::ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw logkg::StorageFailure("cannot write " + path.string());
}

logkg::OntologySchema schema_from(const std::string& path) {
  return path.empty() ? logkg::default_schema() : logkg::load_schema(path);
}

std::string four_digits(std::size_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04zu", n);
  return buf;
}

// Plain files hold one event per line; .jsonl files hold {"raw_text", "context"} objects.
std::vector<logkg::StreamItem> load_events(const std::vector<std::string>& files) {
  std::vector<logkg::StreamItem> items;
  std::uint64_t seq = 0;
  for (const auto& file : files) {
    const fs::path path(file);
    const bool jsonl = path.extension() == ".jsonl";
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_in_file = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::string raw = line;
      std::optional<std::string> context;
      if (jsonl) {
        try {
          const auto j = nlohmann::json::parse(line);
          raw = j.at("raw_text").get<std::string>();
          if (j.contains("context") && !j["context"].is_null()) context = j["context"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw logkg::ConfigError(file + ":" + std::to_string(line_no) + ": " + e.what());
        }
      }
      try {
        auto event = logkg::make_log_event(raw, std::move(context), file, seq);
        items.push_back({std::move(event), path.stem().string() + "-" + four_digits(++n_in_file)});
        ++seq;
      } catch (const logkg::EmptyInput&) {
        // blank after trimming: not an event
      }
    }
  }
  return items;
}

std::string content_digest(const std::string& path) {
  return path.empty() ? std::string() : logkg::sha256_hex(read_file(path));
}

// Stable across output locations: paths are replaced by the digests of what they hold.
std::string derive_run_id(const logkg::cli::IngestSettings& s, const std::vector<std::string>& inputs) {
  auto snapshot = logkg::cli::settings_to_json(s);
  snapshot["store"] = "";
  snapshot["run_id"] = "";
  snapshot["schema"] = content_digest(s.schema);
  snapshot["examples"] = content_digest(s.examples);
  snapshot["script"] = content_digest(s.script);
  ordered_json in = ordered_json::array();
  for (const auto& f : inputs) in.push_back({fs::path(f).filename().string(), content_digest(f)});
  snapshot["inputs"] = std::move(in);
  return "run-" + logkg::sha256_hex(snapshot.dump()).substr(0, 12);
}

struct IngestFlags {
  std::string config;
  std::vector<std::string> inputs;
  std::string predictions_dir;
  std::string dead_letter;
  std::string summary;
  std::string manifest;
  std::int64_t frozen_clock = 0;
  CLI::Option* frozen_clock_opt = nullptr;
  // Flags that override settings, keyed by setting name.
  std::map<std::string, std::pair<CLI::Option*, std::function<nlohmann::json()>>> overrides;
};

template <typename T>
void add_override(CLI::App& cmd, IngestFlags& flags, const std::string& flag, const std::string& key,
                  const std::string& help) {
  auto value = std::make_shared<T>();
  auto* opt = cmd.add_option(flag, *value, help);
  flags.overrides[key] = {opt, [value] { return nlohmann::json(*value); }};
}

int cmd_ingest(const IngestFlags& flags) {
  logkg::cli::IngestSettings s;
  if (!flags.config.empty()) {
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(read_file(flags.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw logkg::ConfigError(flags.config + ": " + e.what());
    }
    logkg::cli::apply_json_layer(s, file, flags.config);
  }
  logkg::cli::apply_env_layer(s, logkg::cli::process_env);
  nlohmann::json flag_layer = nlohmann::json::object();
  for (const auto& [key, entry] : flags.overrides) {
    if (entry.first->count() > 0) flag_layer[key] = entry.second();
  }
  logkg::cli::apply_json_layer(s, flag_layer, "command line");
  logkg::cli::check_settings(s);

  logkg::PipelineConfig cfg;
  cfg.generation.mode = logkg::generation_mode_from_string(s.mode);
  cfg.generation.backend_id = s.backend;
  cfg.generation.temperature = s.temperature;
  cfg.generation.max_correction_rounds = s.max_correction_rounds;
  cfg.generation.transport_retries = s.transport_retries;
  cfg.generation.retry_base_delay = std::chrono::milliseconds(s.retry_base_delay_ms);
  cfg.mmr.k = static_cast<std::size_t>(s.k);
  cfg.mmr.lambda = s.lambda;
  cfg.mmr.fetch_pool = static_cast<std::size_t>(s.fetch_pool);
  cfg.schema = schema_from(s.schema);
  cfg.grow_index = s.grow_index;
  cfg.retrieval_filter = s.retrieval == "any" ? logkg::OriginFilter::kAny : logkg::OriginFilter::kManualOnly;
  cfg.run_id = s.run_id.empty() ? derive_run_id(s, flags.inputs) : s.run_id;
  cfg.check();

  logkg::BackendRegistry registry;
  if (s.backend == "scripted") {
    registry.add("scripted", std::make_shared<logkg::ScriptedBackend>(logkg::ScriptedBackend::load_script(s.script)));
  } else {
    logkg::HttpBackendConfig hc;
    hc.endpoint = s.http_endpoint;
    hc.path = s.http_path;
    hc.model = s.http_model;
    hc.api_key = s.api_key;
    hc.timeout = std::chrono::milliseconds(s.http_timeout_ms);
    registry.add("http", std::make_shared<logkg::HttpChatBackend>(hc));
  }

  std::unique_ptr<logkg::Embedder> embedder;
  if (s.embedder == "http") {
    logkg::HttpEmbedderConfig ec;
    ec.endpoint = s.embed_endpoint;
    ec.path = s.embed_path;
    ec.model = s.embed_model;
    ec.api_key = s.api_key;
    embedder = std::make_unique<logkg::HttpEmbedder>(ec);
  } else {
    embedder = std::make_unique<logkg::HashingEmbedder>(static_cast<std::size_t>(s.embedding_dim));
  }

  const auto events = load_events(flags.inputs);
  logkg::ExampleIndex index;
  if (!s.examples.empty()) index = logkg::ExampleIndex::load_jsonl(s.examples, embedder.get());

  const logkg::Clock clock =
      flags.frozen_clock_opt->count() > 0 ? logkg::frozen_clock(flags.frozen_clock) : logkg::Clock(logkg::system_clock_ms);
  const auto started_at = clock();

  // Every configuration check has passed; only now touch output locations.
  std::unique_ptr<logkg::FileGraphStore> store;
  if (!s.store.empty()) store = std::make_unique<logkg::FileGraphStore>(s.store);
  std::unique_ptr<logkg::DeadLetterLog> dead_letter;
  if (!flags.dead_letter.empty()) dead_letter = std::make_unique<logkg::DeadLetterLog>(flags.dead_letter);
  if (!flags.predictions_dir.empty()) fs::create_directories(flags.predictions_dir);

  logkg::LlmGateway gateway(registry, cfg.schema);
  logkg::PipelineServices services;
  services.gateway = &gateway;
  services.embedder = embedder.get();
  services.store = store.get();
  services.index = &index;
  services.clock = clock;

  auto on_outcome = [&](const logkg::PipelineOutcome& o) {
    if (dead_letter) dead_letter->record(o);
    if (!flags.predictions_dir.empty()) {
      write_file(fs::path(flags.predictions_dir) / (o.event_id + ".json"), logkg::serialize_graph(o.graph) + "\n");
    }
    if (o.store_error) std::cerr << "warning: " << o.event_id << " not persisted: " << *o.store_error << "\n";
  };
  const auto outcomes = logkg::run_stream(events, cfg, services, on_outcome);

  const auto summary = logkg::summary_to_json(logkg::summarize(outcomes, cfg));
  std::cout << summary.dump(2) << "\n";
  if (!flags.summary.empty()) write_file(flags.summary, summary.dump(2) + "\n");
  if (!flags.manifest.empty()) {
    ordered_json m = ordered_json::object();
    m["run_id"] = cfg.run_id;
    m["config"] = logkg::cli::settings_to_json(s);
    m["config"]["run_id"] = cfg.run_id;
    ordered_json inputs = ordered_json::array();
    for (const auto& f : flags.inputs) inputs.push_back({{"path", f}, {"sha256", content_digest(f)}});
    m["inputs"] = std::move(inputs);
    m["seed"] = nullptr;
    m["started_at_ms"] = started_at;
    m["finished_at_ms"] = clock();
    m["outputs"] = {{"store", s.store},
                    {"predictions_dir", flags.predictions_dir},
                    {"dead_letter", flags.dead_letter},
                    {"summary", flags.summary}};
    write_file(flags.manifest, m.dump(2) + "\n");
  }
  return kOk;
}

int cmd_validate(const std::string& schema_path, const std::vector<std::string>& files, bool as_json) {
  const auto schema = schema_from(schema_path);
  int rc = kOk;
  for (const auto& file : files) {
    if (!fs::is_regular_file(file)) {
      std::cerr << "error: " << file << ": no such file\n";
      rc = kMissingFile;
      continue;
    }
    const auto parsed = logkg::parse_graph(read_file(file));
    if (!parsed.graph) {
      if (as_json) {
        std::cout << ordered_json{{"file", file}, {"conforms", false}, {"parse_errors", parsed.errors}}.dump() << "\n";
      } else {
        std::cout << file << ": not a valid graph document\n";
        for (const auto& e : parsed.errors) std::cout << "  " << e << "\n";
      }
      if (rc == kOk) rc = kNotConforming;
      continue;
    }
    const auto report = logkg::validate(*parsed.graph, schema);
    if (as_json) {
      auto j = logkg::report_to_json(report);
      j["file"] = file;
      std::cout << j.dump() << "\n";
    } else if (report.conforms()) {
      std::cout << file << ": conforms\n";
    } else {
      std::cout << file << ": " << report.violations.size() << " violation(s)\n";
      for (const auto& v : report.violations) {
        std::cout << "  [" << logkg::to_string(v.code) << "] " << v.subject << ": " << v.message << "\n";
      }
    }
    if (!report.conforms() && rc == kOk) rc = kNotConforming;
  }
  return rc;
}

int cmd_eval(const std::string& gold, const std::vector<std::string>& prediction_dirs, const std::string& schema_path,
             const std::string& label, const std::string& out_json, const std::string& out_csv) {
  const auto schema = schema_from(schema_path);
  std::vector<logkg::RunScores> runs;
  for (const auto& dir : prediction_dirs) {
    const auto items = logkg::load_eval_corpus(gold, dir);
    runs.push_back(logkg::score_run(items, schema));
  }
  const auto report = logkg::aggregate(runs, label);
  const auto j = logkg::metrics_report_to_json(report);
  if (!out_json.empty()) write_file(out_json, j.dump(2) + "\n");
  const logkg::MetricsReport reports[] = {report};
  if (!out_csv.empty()) write_file(out_csv, logkg::metrics_to_csv(reports));
  std::cout << logkg::metrics_to_csv(reports);
  return kOk;
}

struct SampleFlags {
  std::vector<std::string> files;
  std::string out_dir;
  logkg::SamplerConfig cfg;
  std::string rule = "keep-distant";
  int embedding_dim = 256;
};

int cmd_sample(SampleFlags flags) {
  flags.cfg.rule = logkg::distance_rule_from_string(flags.rule);
  std::vector<fs::path> paths(flags.files.begin(), flags.files.end());
  const auto pool = logkg::build_pool(paths, flags.cfg.pool_per_file);
  const logkg::HashingEmbedder embedder(static_cast<std::size_t>(flags.embedding_dim));
  const auto split = logkg::sample_dataset(pool, embedder, flags.cfg);
  auto dump = [&](const char* name, const std::vector<logkg::SampleEvent>& events) {
    std::string text;
    for (const auto& e : events) text += e.text + "\n";
    write_file(fs::path(flags.out_dir) / name, text);
  };
  dump("fewshot.log", split.fewshot);
  dump("validation.log", split.validation);
  dump("test.log", split.test);
  std::cout << "fewshot " << split.fewshot.size() << ", validation " << split.validation.size() << ", test "
            << split.test.size() << " (pool " << pool.size() << ")\n";
  return kOk;
}

int cmd_export(const std::string& store_dir, const std::string& run_id, const std::string& base_iri,
               const std::string& out) {
  const logkg::FileGraphStore store(store_dir, logkg::FileGraphStore::Mode::kReadOnly);
  const auto ids = store.list_ids(run_id.empty() ? std::nullopt : std::optional<std::string>(run_id));
  const auto doc = logkg::export_ntriples(store, ids, base_iri);
  if (out.empty()) {
    std::cout << doc;
  } else {
    write_file(out, doc);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract ontology-conformant knowledge graphs from log events."};
  app.require_subcommand(1);

  IngestFlags ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Run the extraction pipeline over log files");
  ingest_cmd->add_option("inputs", ingest.inputs, "Log files (.jsonl lines carry raw_text and context)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--config", ingest.config, "JSON settings file")->check(CLI::ExistingFile);
  add_override<std::string>(*ingest_cmd, ingest, "--mode", "mode", "ontologx or baseline");
  add_override<std::string>(*ingest_cmd, ingest, "--schema", "schema", "Ontology schema JSON");
  add_override<std::string>(*ingest_cmd, ingest, "--examples", "examples", "Few-shot examples (JSON lines)");
  add_override<std::string>(*ingest_cmd, ingest, "--store", "store", "Graph store directory");
  add_override<std::string>(*ingest_cmd, ingest, "--backend", "backend", "Generation backend id: scripted or http");
  add_override<std::string>(*ingest_cmd, ingest, "--script", "script", "Responses for the scripted backend");
  add_override<int>(*ingest_cmd, ingest, "--max-rounds", "max_correction_rounds", "Correction rounds (default 3)");
  add_override<double>(*ingest_cmd, ingest, "--temperature", "temperature", "Sampling temperature (default 0.7)");
  add_override<int>(*ingest_cmd, ingest, "--k", "k", "Examples per prompt (default 4)");
  add_override<double>(*ingest_cmd, ingest, "--lambda", "lambda", "MMR relevance weight (default 0.5)");
  add_override<int>(*ingest_cmd, ingest, "--fetch-pool", "fetch_pool", "Neighbours handed to MMR (default 20)");
  add_override<std::string>(*ingest_cmd, ingest, "--run-id", "run_id", "Run id (default: derived from inputs)");
  add_override<bool>(*ingest_cmd, ingest, "--grow-index", "grow_index", "Add stored graphs to the example index");
  ingest_cmd->add_option("--predictions-dir", ingest.predictions_dir, "Write <event id>.json per event");
  ingest_cmd->add_option("--dead-letter", ingest.dead_letter, "JSON-lines log of failed events");
  ingest_cmd->add_option("--summary", ingest.summary, "Also write the run summary here");
  ingest_cmd->add_option("--manifest", ingest.manifest, "Write a run manifest here");
  ingest.frozen_clock_opt =
      ingest_cmd->add_option("--frozen-clock", ingest.frozen_clock, "Use this epoch-ms time for every clock read");

  std::string validate_schema;
  std::vector<std::string> validate_files;
  bool validate_json = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check graph JSON files against the ontology");
  validate_cmd->add_option("files", validate_files, "Graph JSON files")->required();
  validate_cmd->add_option("--schema", validate_schema, "Ontology schema JSON");
  validate_cmd->add_flag("--json", validate_json, "One JSON report per line");

  std::string eval_gold;
  std::vector<std::string> eval_predictions;
  std::string eval_schema;
  std::string eval_label = "run";
  std::string eval_json;
  std::string eval_csv;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold graphs");
  eval_cmd->add_option("--gold", eval_gold, "Directory of <id>.log and <id>.json")->required();
  eval_cmd->add_option("--predictions", eval_predictions, "Predictions directory, once per run")->required();
  eval_cmd->add_option("--schema", eval_schema, "Ontology schema JSON");
  eval_cmd->add_option("--label", eval_label, "Row label in the CSV");
  eval_cmd->add_option("--out-json", eval_json, "Metrics report JSON");
  eval_cmd->add_option("--out-csv", eval_csv, "Metrics CSV");

  SampleFlags sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a diverse fewshot/validation/test split");
  sample_cmd->add_option("files", sample.files, "Log files")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--out", sample.out_dir, "Output directory")->required();
  sample_cmd->add_option("--threshold", sample.cfg.threshold, "Cosine distance threshold (default 0.7)");
  sample_cmd->add_option("--seed", sample.cfg.seed, "Shuffle seed (default 0)");
  sample_cmd->add_option("--pool-per-file", sample.cfg.pool_per_file, "Lines taken per file (default 100)");
  sample_cmd->add_option("--total", sample.cfg.total, "Events to select (default 70)");
  sample_cmd->add_option("--rule", sample.rule, "keep-distant (default) or keep-close");
  sample_cmd->add_option("--embedding-dim", sample.embedding_dim, "Hashing embedder dimension (default 256)");

  std::string export_store;
  std::string export_run;
  std::string export_base{logkg::kDefaultBaseIri};
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export", "Write stored graphs as sorted N-Triples");
  export_cmd->add_option("--store", export_store, "Graph store directory")->required();
  export_cmd->add_option("--run-id", export_run, "Only graphs from this run");
  export_cmd->add_option("--base-iri", export_base, "Base IRI");
  export_cmd->add_option("--out", export_out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest);
    if (*validate_cmd) return cmd_validate(validate_schema, validate_files, validate_json);
    if (*eval_cmd) return cmd_eval(eval_gold, eval_predictions, eval_schema, eval_label, eval_json, eval_csv);
    if (*sample_cmd) return cmd_sample(sample);
    if (*export_cmd) return cmd_export(export_store, export_run, export_base, export_out);
  } catch (const logkg::PoolExhausted& e) {
    std::cerr << "error: PoolExhausted: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return kPoolExhausted;
  } catch (const logkg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const logkg::SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const logkg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsage;
}
