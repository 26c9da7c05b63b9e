#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/example_index.hpp"
#include "logkg/model.hpp"
#include "logkg/schema.hpp"
#include "logkg/validator.hpp"

namespace logkg {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct PromptMessage {
  Role role;
  std::string content;

  bool operator==(const PromptMessage&) const = default;
};

using Conversation = std::vector<PromptMessage>;

/// The system prompt for guided generation, byte-identical to
/// assets/prompts/generation_system.md.
std::string_view generation_system_prompt();

/// The output-format block appended for baseline prompting, before placeholder expansion.
std::string_view baseline_output_format_template();

/// User turn describing a log event (and its context, when present).
std::string render_event_message(std::string_view raw_text, const std::optional<std::string>& context);

/// JSON Schema of the canonical graph. With a schema, node, property and
/// relationship type fields are restricted to the ontology vocabulary.
nlohmann::json graph_output_schema(const OntologySchema* vocabulary);

/// {"Class": ["prop", ...], ...} in schema declaration order.
std::string render_properties_schema(const OntologySchema& s);

/// System prompt, then one user/assistant pair per example, then the event.
/// The ontology itself reaches the model through the structured-output contract.
Conversation build_generation_prompt(const LogEvent& event, std::span<const ExampleRecord> examples);

/// Prompt-only variant: the system prompt gains an output-format section with the
/// JSON format, per-class properties and relationship triples spelled out. No examples.
Conversation build_baseline_prompt(const LogEvent& event, const OntologySchema& schema);

/// Appends one user message listing every violation. Throws ConformingReport if
/// the report has none.
Conversation build_correction_prompt(const ValidationReport& report, const Conversation& prior);

/// Appends one user message listing output-format problems (unparseable output).
/// Throws ConformingReport if `errors` is empty.
Conversation build_format_correction_prompt(std::span<const std::string> errors, const Conversation& prior);

nlohmann::json conversation_to_json(std::span<const PromptMessage> messages);
Conversation conversation_from_json(const nlohmann::json& j);

}  // namespace logkg
