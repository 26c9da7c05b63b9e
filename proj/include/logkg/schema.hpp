#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace logkg {

/// Cardinality and value constraints of one data property on one class.
struct PropertySpec {
  std::string key;
  std::size_t min_count = 0;
  std::optional<std::size_t> max_count = 1;  // nullopt = unbounded
  std::optional<std::vector<std::string>> allowed_values;
  std::optional<std::string> default_value;

  bool required() const { return min_count > 0; }
  bool operator==(const PropertySpec&) const = default;
};

struct ClassSpec {
  std::string name;
  std::vector<PropertySpec> allowed_properties;

  const PropertySpec* find_property(std::string_view key) const;
  bool operator==(const ClassSpec&) const = default;
};

/// Object property with a fixed signature.
struct RelationshipSpec {
  std::string rel_type;
  std::string source_class;
  std::string target_class;

  bool operator==(const RelationshipSpec&) const = default;
};

struct RelationshipTriple {
  std::string source_class;
  std::string rel_type;
  std::string target_class;

  auto operator<=>(const RelationshipTriple&) const = default;
};

/// The log ontology as data. Immutable once built; share by const reference.
struct OntologySchema {
  std::vector<ClassSpec> classes;
  std::vector<RelationshipSpec> relationships;
  std::string anchor_class = "Event";

  const ClassSpec* find_class(std::string_view name) const;
  const RelationshipSpec* find_relationship(std::string_view rel_type) const;
  bool operator==(const OntologySchema&) const = default;
};

/// Built-in log ontology: Event anchor plus auxiliary classes, one hasX relation each.
const OntologySchema& default_schema();

/// Throws SemanticError describing the first violated schema invariant.
void check_schema(const OntologySchema& s);

nlohmann::json schema_to_json(const OntologySchema& s);
std::string serialize_schema(const OntologySchema& s);

/// Throws ParseError on malformed content, SemanticError on dangling references.
OntologySchema parse_schema(std::string_view text);
OntologySchema load_schema(const std::filesystem::path& path);

/// One (source, relation, target) per relationship spec, sorted.
std::vector<RelationshipTriple> relationship_triples(const OntologySchema& s);

/// Renders "(Event, hasUser, UserIdentity), ..." in relationship_triples order.
std::string render_triples(const OntologySchema& s);

}  // namespace logkg
