#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/model.hpp"
#include "logkg/prompts.hpp"
#include "logkg/validator.hpp"

namespace logkg {

/// kInvalidBaseline: a baseline-mode graph that parsed but does not conform. It is
/// kept for scoring but never persisted.
enum class OutcomeStatus { kValidFirstTry, kValidAfterCorrection, kFailedEmpty, kInvalidBaseline };

/// Upper-snake name, e.g. "VALID_AFTER_CORRECTION".
std::string_view to_string(OutcomeStatus status);
OutcomeStatus outcome_status_from_string(std::string_view s);

/// One backend round trip.
struct Attempt {
  Conversation prompt;  // messages added for this attempt; the first attempt holds the whole prompt
  std::string raw_response;
  std::vector<std::string> parse_errors;
  std::optional<ValidationReport> report;  // absent when the output did not parse

  bool operator==(const Attempt&) const = default;
};

struct PipelineOutcome {
  LogEvent event;
  std::string event_id;
  KnowledgeGraph graph;  // empty iff status is kFailedEmpty
  OutcomeStatus status = OutcomeStatus::kFailedEmpty;
  int correction_rounds = 0;
  std::vector<Attempt> trace;
  std::int64_t wall_ms = 0;
  std::optional<std::string> graph_id;     // set once persisted
  std::optional<std::string> store_error;  // set when a valid graph could not be persisted

  bool persisted() const { return graph_id.has_value(); }
  bool operator==(const PipelineOutcome&) const = default;
};

/// Field order is fixed so audit files diff cleanly.
nlohmann::ordered_json attempt_to_json(const Attempt& a);
nlohmann::ordered_json outcome_to_json(const PipelineOutcome& o);

}  // namespace logkg
