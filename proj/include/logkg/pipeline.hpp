#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/embedding.hpp"
#include "logkg/example_index.hpp"
#include "logkg/gateway.hpp"
#include "logkg/graph_store.hpp"
#include "logkg/mmr.hpp"
#include "logkg/outcome.hpp"
#include "logkg/schema.hpp"

namespace logkg {

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;

std::int64_t system_clock_ms();
/// A clock that always reads `epoch_ms`; makes runs byte-reproducible.
Clock frozen_clock(std::int64_t epoch_ms);

struct PipelineConfig {
  GenerationConfig generation;
  MmrConfig mmr;
  OntologySchema schema = default_schema();
  std::string run_id = "run";
  /// Add every persisted graph to the example index as a GENERATED example.
  bool grow_index = false;
  /// Only MANUAL examples are retrieved unless this is kAny.
  OriginFilter retrieval_filter = OriginFilter::kManualOnly;

  /// Throws ConfigError.
  void check() const;
};

/// Non-owning handles to the collaborators of one stream. `store` and `index`
/// may be null: no persistence, or no retrieval.
struct PipelineServices {
  const LlmGateway* gateway = nullptr;
  const Embedder* embedder = nullptr;
  GraphStore* store = nullptr;
  ExampleIndex* index = nullptr;
  Clock clock = system_clock_ms;
};

/// graph id minted at persistence time: "<run_id>-<sequence_no, 6 digits>".
std::string make_graph_id(const std::string& run_id, std::uint64_t sequence_no);

/// Runs retrieve, generate, validate and correct for one event, then persists a
/// conforming graph. Guided mode makes at most 1 + max_correction_rounds backend
/// calls; baseline mode makes exactly one. Storage failures are recorded on the
/// outcome. Transport and embedder failures propagate.
PipelineOutcome process_event(const LogEvent& event, const std::string& event_id, const PipelineConfig& cfg,
                              const PipelineServices& services);

struct StreamItem {
  LogEvent event;
  std::string event_id;
};

/// Processes events strictly in order. `on_outcome` runs after each event is
/// finalized and before the next one starts.
std::vector<PipelineOutcome> run_stream(std::span<const StreamItem> events, const PipelineConfig& cfg,
                                        const PipelineServices& services,
                                        const std::function<void(const PipelineOutcome&)>& on_outcome = {});

/// JSON-lines audit log of outcomes that produced no stored graph.
class DeadLetterLog {
 public:
  /// Truncates `path`. Throws StorageFailure.
  explicit DeadLetterLog(const std::filesystem::path& path);

  /// Writes FAILED_EMPTY and INVALID_BASELINE outcomes; ignores the rest.
  void record(const PipelineOutcome& outcome);
  std::size_t written() const { return written_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

struct RunSummary {
  std::string run_id;
  GenerationMode mode = GenerationMode::kGuided;
  std::map<OutcomeStatus, std::size_t> status_counts;
  std::size_t events = 0;
  std::size_t persisted = 0;
  std::size_t unpersisted_valid = 0;
  long total_correction_rounds = 0;
  double mean_correction_rounds = 0.0;
  std::int64_t total_wall_ms = 0;
  std::vector<std::int64_t> wall_ms_per_event;
};

RunSummary summarize(std::span<const PipelineOutcome> outcomes, const PipelineConfig& cfg);
nlohmann::ordered_json summary_to_json(const RunSummary& s);

}  // namespace logkg
