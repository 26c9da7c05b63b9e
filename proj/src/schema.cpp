#include "logkg/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "logkg/errors.hpp"

namespace logkg {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

const PropertySpec* ClassSpec::find_property(std::string_view key) const {
  for (const auto& p : allowed_properties) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

const ClassSpec* OntologySchema::find_class(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const RelationshipSpec* OntologySchema::find_relationship(std::string_view rel_type) const {
  for (const auto& r : relationships) {
    if (r.rel_type == rel_type) return &r;
  }
  return nullptr;
}

namespace {

PropertySpec optional_one(std::string key) { return {std::move(key), 0, 1, std::nullopt, std::nullopt}; }

OntologySchema build_default_schema() {
  OntologySchema s;
  s.anchor_class = "Event";
  s.classes = {
      {"Event",
       {{"eventMessage", 1, 1, std::nullopt, std::nullopt},
        {"logLevel", 1, 1,
         std::vector<std::string>{"TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"},
         "INFO"}}},
      {"UserIdentity", {optional_one("userUID")}},
      {"Application", {optional_one("applicationName")}},
      {"Process", {optional_one("processName"), optional_one("processPID")}},
      {"File", {optional_one("fileName")}},
      {"NetworkAddress", {optional_one("addressIP"), optional_one("addressPort")}},
      {"Source", {optional_one("sourceName")}},
      {"URL", {optional_one("urlValue")}},
      {"Instant", {optional_one("timestampValue")}},
  };
  s.relationships = {
      {"hasUser", "Event", "UserIdentity"},
      {"hasProcess", "Event", "Process"},
      {"hasApplication", "Event", "Application"},
      {"hasFile", "Event", "File"},
      {"hasNetworkAddress", "Event", "NetworkAddress"},
      {"hasSource", "Event", "Source"},
      {"hasURL", "Event", "URL"},
      {"hasTimestamp", "Event", "Instant"},
  };
  return s;
}

[[noreturn]] void parse_fail(const std::string& what) { throw ParseError("schema: " + what); }

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      parse_fail("unexpected field '" + key + "' in " + where);
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) parse_fail("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string() || v.get<std::string>().empty()) {
    parse_fail("field '" + std::string(key) + "' in " + where + " must be a non-empty string");
  }
  return v.get<std::string>();
}

std::size_t require_count(const json& v, const std::string& what) {
  if (!v.is_number_unsigned()) parse_fail(what + " must be a non-negative integer");
  return v.get<std::size_t>();
}

PropertySpec property_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where + " must be an object");
  reject_unknown(j, {"key", "min_count", "max_count", "allowed_values", "default"}, where);
  PropertySpec p;
  p.key = require_string(j, "key", where);
  p.min_count = require_count(require(j, "min_count", where), where + ".min_count");
  const json& max = require(j, "max_count", where);
  if (max.is_null()) {
    p.max_count.reset();
  } else {
    p.max_count = require_count(max, where + ".max_count");
  }
  if (const auto it = j.find("allowed_values"); it != j.end()) {
    if (!it->is_array()) parse_fail(where + ".allowed_values must be an array");
    std::vector<std::string> values;
    for (const auto& v : *it) {
      if (!v.is_string()) parse_fail(where + ".allowed_values must hold strings");
      values.push_back(v.get<std::string>());
    }
    p.allowed_values = std::move(values);
  }
  if (const auto it = j.find("default"); it != j.end()) {
    if (!it->is_string()) parse_fail(where + ".default must be a string");
    p.default_value = it->get<std::string>();
  }
  return p;
}

}  // namespace

const OntologySchema& default_schema() {
  static const OntologySchema schema = [] {
    auto s = build_default_schema();
    check_schema(s);
    return s;
  }();
  return schema;
}

void check_schema(const OntologySchema& s) {
  std::set<std::string> class_names;
  for (const auto& c : s.classes) {
    if (c.name.empty()) throw SemanticError("class with empty name");
    if (!class_names.insert(c.name).second) throw SemanticError("duplicate class '" + c.name + "'");
    std::set<std::string> keys;
    for (const auto& p : c.allowed_properties) {
      const std::string where = c.name + "." + p.key;
      if (p.key.empty()) throw SemanticError("property with empty key on class '" + c.name + "'");
      if (!keys.insert(p.key).second) throw SemanticError("duplicate property '" + where + "'");
      if (p.max_count && *p.max_count == 0) throw SemanticError(where + ": max_count must be positive");
      if (p.max_count && p.min_count > *p.max_count) {
        throw SemanticError(where + ": min_count exceeds max_count");
      }
      if (p.default_value && p.allowed_values &&
          std::find(p.allowed_values->begin(), p.allowed_values->end(), *p.default_value) ==
              p.allowed_values->end()) {
        throw SemanticError(where + ": default value not among allowed values");
      }
    }
  }
  if (!class_names.contains(s.anchor_class)) {
    throw SemanticError("anchor class '" + s.anchor_class + "' is not declared");
  }
  std::set<std::string> rel_types;
  for (const auto& r : s.relationships) {
    if (r.rel_type.empty()) throw SemanticError("relationship with empty type");
    if (!rel_types.insert(r.rel_type).second) {
      throw SemanticError("relationship type '" + r.rel_type + "' declared more than once");
    }
    for (const auto* cls : {&r.source_class, &r.target_class}) {
      if (!class_names.contains(*cls)) {
        throw SemanticError("relationship '" + r.rel_type + "' references undeclared class '" + *cls + "'");
      }
    }
  }
}

json schema_to_json(const OntologySchema& s) { return json::parse(serialize_schema(s)); }

std::string serialize_schema(const OntologySchema& s) {
  ordered_json out = ordered_json::object();
  out["anchor_class"] = s.anchor_class;
  out["classes"] = ordered_json::array();
  for (const auto& c : s.classes) {
    ordered_json jc = ordered_json::object();
    jc["name"] = c.name;
    jc["properties"] = ordered_json::array();
    for (const auto& p : c.allowed_properties) {
      ordered_json jp = ordered_json::object();
      jp["key"] = p.key;
      jp["min_count"] = p.min_count;
      jp["max_count"] = p.max_count ? ordered_json(*p.max_count) : ordered_json(nullptr);
      if (p.allowed_values) jp["allowed_values"] = *p.allowed_values;
      if (p.default_value) jp["default"] = *p.default_value;
      jc["properties"].push_back(std::move(jp));
    }
    out["classes"].push_back(std::move(jc));
  }
  out["relationships"] = ordered_json::array();
  for (const auto& r : s.relationships) {
    ordered_json jr = ordered_json::object();
    jr["type"] = r.rel_type;
    jr["source"] = r.source_class;
    jr["target"] = r.target_class;
    out["relationships"].push_back(std::move(jr));
  }
  return out.dump(2) + "\n";
}

OntologySchema parse_schema(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) parse_fail("top level must be an object");
  reject_unknown(j, {"anchor_class", "classes", "relationships"}, "schema");

  OntologySchema s;
  s.anchor_class = require_string(j, "anchor_class", "schema");
  const json& classes = require(j, "classes", "schema");
  if (!classes.is_array()) parse_fail("'classes' must be an array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const json& jc = classes[i];
    const std::string where = "classes[" + std::to_string(i) + "]";
    if (!jc.is_object()) parse_fail(where + " must be an object");
    reject_unknown(jc, {"name", "properties"}, where);
    ClassSpec c;
    c.name = require_string(jc, "name", where);
    const json& props = require(jc, "properties", where);
    if (!props.is_array()) parse_fail(where + ".properties must be an array");
    for (std::size_t k = 0; k < props.size(); ++k) {
      c.allowed_properties.push_back(
          property_from_json(props[k], where + ".properties[" + std::to_string(k) + "]"));
    }
    s.classes.push_back(std::move(c));
  }
  const json& rels = require(j, "relationships", "schema");
  if (!rels.is_array()) parse_fail("'relationships' must be an array");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const json& jr = rels[i];
    const std::string where = "relationships[" + std::to_string(i) + "]";
    if (!jr.is_object()) parse_fail(where + " must be an object");
    reject_unknown(jr, {"type", "source", "target"}, where);
    s.relationships.push_back({require_string(jr, "type", where), require_string(jr, "source", where),
                               require_string(jr, "target", where)});
  }
  check_schema(s);
  return s;
}

OntologySchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open schema file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

std::vector<RelationshipTriple> relationship_triples(const OntologySchema& s) {
  std::vector<RelationshipTriple> out;
  out.reserve(s.relationships.size());
  for (const auto& r : s.relationships) out.push_back({r.source_class, r.rel_type, r.target_class});
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_triples(const OntologySchema& s) {
  std::string out;
  for (const auto& t : relationship_triples(s)) {
    if (!out.empty()) out += ", ";
    out += "(" + t.source_class + ", " + t.rel_type + ", " + t.target_class + ")";
  }
  return out;
}

}  // namespace logkg
