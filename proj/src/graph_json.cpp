#include "logkg/graph_json.hpp"

#include <initializer_list>

#include "logkg/errors.hpp"

namespace logkg {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json to_ordered(const KnowledgeGraph& g) {
  ordered_json out = ordered_json::object();
  out["nodes"] = ordered_json::array();
  for (const auto& node : g.nodes) {
    ordered_json props = ordered_json::array();
    for (const auto& p : node.properties) {
      ordered_json jp = ordered_json::object();
      jp["type"] = p.key;
      jp["value"] = p.value;
      props.push_back(std::move(jp));
    }
    ordered_json jn = ordered_json::object();
    jn["id"] = node.id;
    jn["type"] = node.node_type;
    jn["properties"] = std::move(props);
    out["nodes"].push_back(std::move(jn));
  }
  out["relationships"] = ordered_json::array();
  for (const auto& rel : g.relationships) {
    ordered_json jr = ordered_json::object();
    jr["source_id"] = rel.source_id;
    jr["target_id"] = rel.target_id;
    jr["type"] = rel.rel_type;
    out["relationships"].push_back(std::move(jr));
  }
  return out;
}

class Checker {
 public:
  std::vector<std::string> errors;

  bool expect_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    errors.push_back(path.empty() ? "expected a JSON object" : path + ": expected object");
    return false;
  }

  void check_fields(const json& j, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
    for (const char* key : allowed) {
      if (!j.contains(key)) errors.push_back("missing field: " + prefix + key);
    }
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) errors.push_back("unexpected field: " + prefix + key);
    }
  }

  std::string string_field(const json& j, const char* key, const std::string& prefix) {
    const auto it = j.find(key);
    if (it == j.end()) return {};
    if (!it->is_string()) {
      errors.push_back(prefix + key + ": expected string");
      return {};
    }
    auto value = it->get<std::string>();
    if (value.empty()) errors.push_back(prefix + key + ": must not be empty");
    return value;
  }

  const json* array_field(const json& j, const char* key, const std::string& prefix) {
    const auto it = j.find(key);
    if (it == j.end()) return nullptr;
    if (!it->is_array()) {
      errors.push_back(prefix + key + ": expected array");
      return nullptr;
    }
    return &*it;
  }
};

}  // namespace

json graph_to_json(const KnowledgeGraph& g) { return json::parse(to_ordered(g).dump()); }

std::string serialize_graph(const KnowledgeGraph& g) { return to_ordered(g).dump(); }

GraphParseResult graph_from_json(const json& j) {
  Checker c;
  KnowledgeGraph g;
  if (!c.expect_object(j, "")) return {std::nullopt, std::move(c.errors)};
  c.check_fields(j, "", {"nodes", "relationships"});

  if (const json* nodes = c.array_field(j, "nodes", "")) {
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const std::string path = "nodes[" + std::to_string(i) + "]";
      const json& jn = (*nodes)[i];
      if (!c.expect_object(jn, path)) continue;
      c.check_fields(jn, path + ".", {"id", "type", "properties"});
      GraphNode node;
      node.id = c.string_field(jn, "id", path + ".");
      node.node_type = c.string_field(jn, "type", path + ".");
      if (const json* props = c.array_field(jn, "properties", path + ".")) {
        for (std::size_t k = 0; k < props->size(); ++k) {
          const std::string ppath = path + ".properties[" + std::to_string(k) + "]";
          const json& jp = (*props)[k];
          if (!c.expect_object(jp, ppath)) continue;
          c.check_fields(jp, ppath + ".", {"type", "value"});
          NodeProperty prop;
          prop.key = c.string_field(jp, "type", ppath + ".");
          prop.value = c.string_field(jp, "value", ppath + ".");
          node.properties.push_back(std::move(prop));
        }
      }
      g.nodes.push_back(std::move(node));
    }
  }

  if (const json* rels = c.array_field(j, "relationships", "")) {
    for (std::size_t i = 0; i < rels->size(); ++i) {
      const std::string path = "relationships[" + std::to_string(i) + "]";
      const json& jr = (*rels)[i];
      if (!c.expect_object(jr, path)) continue;
      c.check_fields(jr, path + ".", {"source_id", "target_id", "type"});
      GraphRelationship rel;
      rel.source_id = c.string_field(jr, "source_id", path + ".");
      rel.target_id = c.string_field(jr, "target_id", path + ".");
      rel.rel_type = c.string_field(jr, "type", path + ".");
      g.relationships.push_back(std::move(rel));
    }
  }

  if (!c.errors.empty()) return {std::nullopt, std::move(c.errors)};
  return {std::move(g), {}};
}

GraphParseResult parse_graph(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::nullopt, {std::string("invalid JSON: ") + e.what()}};
  }
  return graph_from_json(j);
}

KnowledgeGraph parse_graph_or_throw(std::string_view text) {
  auto result = parse_graph(text);
  if (!result.graph) {
    std::string msg = "malformed graph JSON";
    for (const auto& e : result.errors) msg += "; " + e;
    throw ParseError(msg);
  }
  return std::move(*result.graph);
}

}  // namespace logkg
