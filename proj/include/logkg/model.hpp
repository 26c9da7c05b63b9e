#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logkg {

/// One raw log line plus optional provenance.
struct LogEvent {
  std::string raw_text;
  std::optional<std::string> context;
  std::optional<std::string> source_file;
  std::uint64_t sequence_no = 0;

  /// Text handed to the embedder: the log line, then the context on its own line.
  std::string embedding_text() const;

  bool operator==(const LogEvent&) const = default;
};

/// Builds a LogEvent from raw bytes, replacing invalid UTF-8. Throws EmptyInput
/// when the text is blank after trimming.
LogEvent make_log_event(std::string_view raw_bytes, std::optional<std::string> context,
                        std::optional<std::string> source_file, std::uint64_t sequence_no);

struct NodeProperty {
  std::string key;
  std::string value;

  bool operator==(const NodeProperty&) const = default;
};

struct GraphNode {
  std::string id;
  std::string node_type;
  std::vector<NodeProperty> properties;

  /// First value stored under key, if any.
  const std::string* property(std::string_view key) const;

  bool operator==(const GraphNode&) const = default;
};

struct GraphRelationship {
  std::string source_id;
  std::string target_id;
  std::string rel_type;

  bool operator==(const GraphRelationship&) const = default;
};

struct KnowledgeGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphRelationship> relationships;

  const GraphNode* find_node(std::string_view id) const;

  bool operator==(const KnowledgeGraph&) const = default;
};

bool graph_is_empty(const KnowledgeGraph& g);

enum class StructuralErrorKind { kDuplicateNodeId, kDanglingEndpoint, kDuplicatePropertyKey };

struct StructuralError {
  StructuralErrorKind kind;
  std::string node_id;       // duplicated id, missing endpoint id, or owner of the duplicated key
  std::string property_key;  // only for kDuplicatePropertyKey
  std::size_t relationship_index = 0;  // only for kDanglingEndpoint

  bool operator==(const StructuralError&) const = default;
};

std::string to_string(const StructuralError& e);

/// Reports duplicate node ids (once per id), every dangling relationship endpoint,
/// and duplicate property keys (once per node/key). Empty result means well-formed.
std::vector<StructuralError> structural_check(const KnowledgeGraph& g);

}  // namespace logkg
