#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/model.hpp"

namespace logkg {

// Canonical JSON rendering of a knowledge graph:
//   {"nodes":[{"id":..,"type":..,"properties":[{"type":..,"value":..}]}],
//    "relationships":[{"source_id":..,"target_id":..,"type":..}]}
// The same shape is the structured-output contract handed to the model.

nlohmann::json graph_to_json(const KnowledgeGraph& g);

/// Compact single-line rendering with keys in canonical order.
std::string serialize_graph(const KnowledgeGraph& g);

struct GraphParseResult {
  std::optional<KnowledgeGraph> graph;
  std::vector<std::string> errors;
};

/// Strict schema check. Any deviation (missing or unexpected field, wrong type,
/// empty identifier) is reported and no graph is returned.
GraphParseResult graph_from_json(const nlohmann::json& j);

/// Parses text that must be exactly one JSON document.
GraphParseResult parse_graph(std::string_view text);

/// Throwing variant used for files on disk. Throws ParseError.
KnowledgeGraph parse_graph_or_throw(std::string_view text);

}  // namespace logkg
