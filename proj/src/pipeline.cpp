#include "logkg/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"

namespace logkg {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kEmptyResponsePlaceholder = "(empty response)";

ordered_json optional_string(const std::optional<std::string>& s) {
  return s ? ordered_json(*s) : ordered_json(nullptr);
}

}  // namespace

std::string_view to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kValidFirstTry: return "VALID_FIRST_TRY";
    case OutcomeStatus::kValidAfterCorrection: return "VALID_AFTER_CORRECTION";
    case OutcomeStatus::kFailedEmpty: return "FAILED_EMPTY";
    case OutcomeStatus::kInvalidBaseline: return "INVALID_BASELINE";
  }
  return "FAILED_EMPTY";
}

OutcomeStatus outcome_status_from_string(std::string_view s) {
  for (auto st : {OutcomeStatus::kValidFirstTry, OutcomeStatus::kValidAfterCorrection, OutcomeStatus::kFailedEmpty,
                  OutcomeStatus::kInvalidBaseline}) {
    if (to_string(st) == s) return st;
  }
  throw ParseError("unknown outcome status '" + std::string(s) + "'");
}

ordered_json attempt_to_json(const Attempt& a) {
  ordered_json j = ordered_json::object();
  j["prompt"] = ordered_json::parse(conversation_to_json(a.prompt).dump());
  j["raw_response"] = a.raw_response;
  j["parse_errors"] = a.parse_errors;
  j["report"] = a.report ? ordered_json::parse(report_to_json(*a.report).dump()) : ordered_json(nullptr);
  return j;
}

ordered_json outcome_to_json(const PipelineOutcome& o) {
  ordered_json j = ordered_json::object();
  j["event_id"] = o.event_id;
  j["sequence_no"] = o.event.sequence_no;
  j["raw_text"] = o.event.raw_text;
  j["context"] = optional_string(o.event.context);
  j["source_file"] = optional_string(o.event.source_file);
  j["status"] = to_string(o.status);
  j["correction_rounds"] = o.correction_rounds;
  j["graph"] = ordered_json::parse(serialize_graph(o.graph));
  j["graph_id"] = optional_string(o.graph_id);
  j["store_error"] = optional_string(o.store_error);
  j["wall_ms"] = o.wall_ms;
  ordered_json trace = ordered_json::array();
  for (const auto& a : o.trace) trace.push_back(attempt_to_json(a));
  j["trace"] = std::move(trace);
  return j;
}

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Clock frozen_clock(std::int64_t epoch_ms) {
  return [epoch_ms] { return epoch_ms; };
}

void PipelineConfig::check() const {
  generation.check();
  mmr.check();
  check_schema(schema);
  if (run_id.empty()) throw ConfigError("run id is empty");
}

std::string make_graph_id(const std::string& run_id, std::uint64_t sequence_no) {
  char digits[32];
  std::snprintf(digits, sizeof digits, "%06llu", static_cast<unsigned long long>(sequence_no));
  return run_id + "-" + digits;
}

PipelineOutcome process_event(const LogEvent& event, const std::string& event_id, const PipelineConfig& cfg,
                              const PipelineServices& services) {
  if (!services.gateway) throw ConfigError("pipeline has no generation gateway");
  if (!services.embedder) throw ConfigError("pipeline has no embedder");
  const Clock clock = services.clock ? services.clock : Clock(system_clock_ms);
  const std::int64_t started = clock();

  PipelineOutcome outcome;
  outcome.event = event;
  outcome.event_id = event_id;

  const bool guided = cfg.generation.mode == GenerationMode::kGuided;
  const Embedding query = services.embedder->embed(event.embedding_text());

  Conversation conversation;
  if (guided) {
    std::vector<ExampleRecord> examples;
    if (services.index && services.index->size() > 0) {
      const auto pool = services.index->search_pool(query, cfg.mmr.fetch_pool, cfg.retrieval_filter);
      examples = mmr_select(query, pool, cfg.mmr);
    }
    conversation = build_generation_prompt(event, examples);
  } else {
    conversation = build_baseline_prompt(event, cfg.schema);
  }

  ValidationOptions options;
  options.expected_event_message = event.raw_text;

  const int max_rounds = guided ? cfg.generation.max_correction_rounds : 0;
  std::size_t delta_start = 0;
  std::optional<KnowledgeGraph> accepted;
  std::optional<KnowledgeGraph> last_parsed;
  for (int round = 0;; ++round) {
    auto response = services.gateway->generate(conversation, cfg.generation);

    Attempt attempt;
    attempt.prompt.assign(conversation.begin() + static_cast<std::ptrdiff_t>(delta_start), conversation.end());
    attempt.raw_response = response.raw_text;
    attempt.parse_errors = response.parse_errors;
    if (response.parsed) attempt.report = validate(*response.parsed, cfg.schema, options);
    const bool conforms = attempt.report && attempt.report->conforms();
    const auto report = attempt.report;
    outcome.trace.push_back(std::move(attempt));

    if (conforms) {
      accepted = std::move(response.parsed);
      outcome.status = round == 0 ? OutcomeStatus::kValidFirstTry : OutcomeStatus::kValidAfterCorrection;
      outcome.correction_rounds = round;
      break;
    }
    if (round >= max_rounds) {
      outcome.correction_rounds = round;
      last_parsed = std::move(response.parsed);
      break;
    }

    delta_start = conversation.size();
    conversation.push_back({Role::kAssistant, response.raw_text.empty() ? std::string(kEmptyResponsePlaceholder)
                                                                      : response.raw_text});
    conversation = report ? build_correction_prompt(*report, conversation)
                          : build_format_correction_prompt(response.parse_errors, conversation);
  }

  if (accepted) {
    outcome.graph = std::move(*accepted);
  } else if (!guided && last_parsed && !graph_is_empty(*last_parsed)) {
    outcome.graph = std::move(*last_parsed);
    outcome.status = OutcomeStatus::kInvalidBaseline;
  } else {
    outcome.status = OutcomeStatus::kFailedEmpty;
  }

  if (accepted && services.store) {
    StoredGraph sg;
    sg.graph_id = make_graph_id(cfg.run_id, event.sequence_no);
    sg.graph = outcome.graph;
    sg.source_log = event.raw_text;
    sg.context = event.context;
    sg.embedding = query;
    sg.created_at_ms = clock();
    sg.pipeline_run_id = cfg.run_id;
    try {
      outcome.graph_id = services.store->put(sg);
    } catch (const StorageFailure& e) {
      outcome.store_error = e.what();
    } catch (const DuplicateId& e) {
      outcome.store_error = e.what();
    }
  }
  if (accepted && outcome.persisted() && cfg.grow_index && services.index) {
    ExampleRecord example;
    example.log_text = event.raw_text;
    example.context = event.context;
    example.graph = outcome.graph;
    example.embedding = query;
    example.origin = ExampleOrigin::kGenerated;
    services.index->add_example(std::move(example));
  }

  outcome.wall_ms = clock() - started;
  return outcome;
}

std::vector<PipelineOutcome> run_stream(std::span<const StreamItem> events, const PipelineConfig& cfg,
                                        const PipelineServices& services,
                                        const std::function<void(const PipelineOutcome&)>& on_outcome) {
  cfg.check();
  std::vector<PipelineOutcome> outcomes;
  outcomes.reserve(events.size());
  for (const auto& item : events) {
    outcomes.push_back(process_event(item.event, item.event_id, cfg, services));
    if (on_outcome) on_outcome(outcomes.back());
  }
  return outcomes;
}

DeadLetterLog::DeadLetterLog(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw StorageFailure("cannot open dead-letter log " + path.string());
}

void DeadLetterLog::record(const PipelineOutcome& outcome) {
  if (outcome.status != OutcomeStatus::kFailedEmpty && outcome.status != OutcomeStatus::kInvalidBaseline) return;
  out_ << outcome_to_json(outcome).dump() << '\n';
  out_.flush();
  if (!out_) throw StorageFailure("write failed on dead-letter log " + path_.string());
  ++written_;
}

RunSummary summarize(std::span<const PipelineOutcome> outcomes, const PipelineConfig& cfg) {
  RunSummary s;
  s.run_id = cfg.run_id;
  s.mode = cfg.generation.mode;
  for (auto st : {OutcomeStatus::kValidFirstTry, OutcomeStatus::kValidAfterCorrection, OutcomeStatus::kFailedEmpty,
                  OutcomeStatus::kInvalidBaseline}) {
    s.status_counts[st] = 0;
  }
  for (const auto& o : outcomes) {
    ++s.events;
    ++s.status_counts[o.status];
    if (o.persisted()) ++s.persisted;
    if (o.store_error) ++s.unpersisted_valid;
    s.total_correction_rounds += o.correction_rounds;
    s.total_wall_ms += o.wall_ms;
    s.wall_ms_per_event.push_back(o.wall_ms);
  }
  if (s.events > 0) s.mean_correction_rounds = static_cast<double>(s.total_correction_rounds) / s.events;
  return s;
}

ordered_json summary_to_json(const RunSummary& s) {
  ordered_json j = ordered_json::object();
  j["run_id"] = s.run_id;
  j["mode"] = to_string(s.mode);
  j["events"] = s.events;
  ordered_json counts = ordered_json::object();
  for (const auto& [st, n] : s.status_counts) counts[std::string(to_string(st))] = n;
  j["status_counts"] = std::move(counts);
  j["persisted"] = s.persisted;
  j["unpersisted_valid"] = s.unpersisted_valid;
  j["total_correction_rounds"] = s.total_correction_rounds;
  j["mean_correction_rounds"] = s.mean_correction_rounds;
  j["total_wall_ms"] = s.total_wall_ms;
  j["wall_ms_per_event"] = s.wall_ms_per_event;
  return j;
}

}  // namespace logkg
