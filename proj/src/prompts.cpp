#include "logkg/prompts.hpp"

#include <algorithm>

#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"
#include "prompt_assets.hpp"

namespace logkg {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::kSystem;
  if (s == "user") return Role::kUser;
  if (s == "assistant") return Role::kAssistant;
  throw ParseError("unknown message role '" + std::string(s) + "'");
}

std::string_view generation_system_prompt() { return assets::kGenerationSystemPrompt; }

std::string_view baseline_output_format_template() { return assets::kBaselineOutputFormat; }

std::string render_event_message(std::string_view raw_text, const std::optional<std::string>& context) {
  std::string out = "Log event: ";
  out += raw_text;
  if (context && !context->empty()) {
    out += "\nContext: ";
    out += *context;
  }
  return out;
}

namespace {

ordered_json string_field(const char* description) {
  ordered_json j = ordered_json::object();
  j["type"] = "string";
  j["description"] = description;
  return j;
}

ordered_json object_schema(const char* description, ordered_json properties,
                           std::initializer_list<const char*> required) {
  ordered_json j = ordered_json::object();
  j["type"] = "object";
  j["description"] = description;
  j["properties"] = std::move(properties);
  j["required"] = ordered_json::array();
  for (const char* r : required) j["required"].push_back(r);
  j["additionalProperties"] = false;
  return j;
}

ordered_json array_of(const char* description, ordered_json items) {
  ordered_json j = ordered_json::object();
  j["type"] = "array";
  j["description"] = description;
  j["items"] = std::move(items);
  return j;
}

ordered_json output_schema_ordered(const OntologySchema* vocabulary) {
  auto class_field = string_field("Ontology class of the node.");
  auto property_field = string_field("Ontology data property name.");
  auto relation_field = string_field("Ontology object property name.");
  if (vocabulary) {
    class_field["enum"] = ordered_json::array();
    property_field["enum"] = ordered_json::array();
    relation_field["enum"] = ordered_json::array();
    std::vector<std::string> seen;
    for (const auto& c : vocabulary->classes) {
      class_field["enum"].push_back(c.name);
      for (const auto& p : c.allowed_properties) {
        if (std::find(seen.begin(), seen.end(), p.key) != seen.end()) continue;
        seen.push_back(p.key);
        property_field["enum"].push_back(p.key);
      }
    }
    for (const auto& r : vocabulary->relationships) relation_field["enum"].push_back(r.rel_type);
  }

  ordered_json property_props = ordered_json::object();
  property_props["type"] = std::move(property_field);
  property_props["value"] = string_field("Value extracted from the event, as a string.");
  auto property = object_schema("A data property of a node.", std::move(property_props), {"type", "value"});

  ordered_json node_props = ordered_json::object();
  node_props["id"] = string_field("Identifier of the node, unique within the graph.");
  node_props["type"] = std::move(class_field);
  node_props["properties"] = array_of("Data properties of the node.", std::move(property));
  auto node = object_schema("A node of the event graph.", std::move(node_props), {"id", "type", "properties"});

  ordered_json rel_props = ordered_json::object();
  rel_props["source_id"] = string_field("Id of the source node.");
  rel_props["target_id"] = string_field("Id of the target node.");
  rel_props["type"] = std::move(relation_field);
  auto relationship = object_schema("A directed relationship between two nodes.", std::move(rel_props),
                                    {"source_id", "target_id", "type"});

  ordered_json top = ordered_json::object();
  top["nodes"] = array_of("Nodes of the graph.", std::move(node));
  top["relationships"] = array_of("Relationships of the graph.", std::move(relationship));
  return object_schema("Knowledge graph extracted from one log event.", std::move(top),
                       {"nodes", "relationships"});
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string enumerate(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  }
  return out;
}

}  // namespace

nlohmann::json graph_output_schema(const OntologySchema* vocabulary) {
  return nlohmann::json::parse(output_schema_ordered(vocabulary).dump());
}

std::string render_properties_schema(const OntologySchema& s) {
  ordered_json j = ordered_json::object();
  for (const auto& c : s.classes) {
    j[c.name] = ordered_json::array();
    for (const auto& p : c.allowed_properties) j[c.name].push_back(p.key);
  }
  return j.dump();
}

Conversation build_generation_prompt(const LogEvent& event, std::span<const ExampleRecord> examples) {
  Conversation messages;
  messages.reserve(2 + 2 * examples.size());
  messages.push_back({Role::kSystem, std::string(generation_system_prompt())});
  for (const auto& ex : examples) {
    messages.push_back({Role::kUser, render_event_message(ex.log_text, ex.context)});
    messages.push_back({Role::kAssistant, serialize_graph(ex.graph)});
  }
  messages.push_back({Role::kUser, render_event_message(event.raw_text, event.context)});
  return messages;
}

Conversation build_baseline_prompt(const LogEvent& event, const OntologySchema& schema) {
  const std::string_view base = generation_system_prompt();
  // The output-format block ends with its own "Strict Compliance" section, which
  // takes the place of the closing section of the guided prompt.
  const auto tail = base.find("# Strict Compliance");
  std::string system(base.substr(0, tail));

  std::string additions(baseline_output_format_template());
  replace_all(additions, "{{json output format}}", output_schema_ordered(nullptr).dump());
  replace_all(additions, "{{properties schema}}", render_properties_schema(schema));
  replace_all(additions, "{{triples}}", render_triples(schema));
  system += additions;

  return {{Role::kSystem, std::move(system)},
          {Role::kUser, render_event_message(event.raw_text, event.context)}};
}

Conversation build_correction_prompt(const ValidationReport& report, const Conversation& prior) {
  if (report.conforms()) throw ConformingReport("graph already conforms; nothing to correct");
  std::vector<std::string> items;
  items.reserve(report.violations.size());
  for (const auto& v : report.violations) {
    items.push_back("[" + std::string(to_string(v.code)) + "] " + v.subject + ": " + v.message);
  }
  Conversation out = prior;
  out.push_back({Role::kUser,
                 "The graph you returned violates the ontology constraints. Fix every issue listed "
                 "below:\n" +
                     enumerate(items) +
                     "Return the full corrected graph in the same format, not only the changed parts."});
  return out;
}

Conversation build_format_correction_prompt(std::span<const std::string> errors, const Conversation& prior) {
  if (errors.empty()) throw ConformingReport("output parsed; nothing to correct");
  Conversation out = prior;
  out.push_back({Role::kUser,
                 "Your output is not a well-formed knowledge graph in the required format. Fix every "
                 "issue listed below:\n" +
                     enumerate({errors.begin(), errors.end()}) +
                     "Return the full corrected graph in the same format, not only the changed parts."});
  return out;
}

nlohmann::json conversation_to_json(std::span<const PromptMessage> messages) {
  ordered_json out = ordered_json::array();
  for (const auto& m : messages) {
    ordered_json jm = ordered_json::object();
    jm["role"] = to_string(m.role);
    jm["content"] = m.content;
    out.push_back(std::move(jm));
  }
  return nlohmann::json::parse(out.dump());
}

Conversation conversation_from_json(const nlohmann::json& j) {
  Conversation out;
  try {
    for (const auto& jm : j) {
      out.push_back({role_from_string(jm.at("role").get<std::string>()), jm.at("content").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed conversation: ") + e.what());
  }
  return out;
}

}  // namespace logkg
