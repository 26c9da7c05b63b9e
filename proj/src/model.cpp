#include "logkg/model.hpp"

#include <set>
#include <unordered_set>

#include "logkg/errors.hpp"
#include "logkg/text.hpp"

namespace logkg {

std::string LogEvent::embedding_text() const {
  if (!context || context->empty()) return raw_text;
  return raw_text + "\n" + *context;
}

LogEvent make_log_event(std::string_view raw_bytes, std::optional<std::string> context,
                        std::optional<std::string> source_file, std::uint64_t sequence_no) {
  LogEvent event;
  event.raw_text = text::sanitize_utf8(raw_bytes);
  if (text::trim(event.raw_text).empty()) {
    throw EmptyInput("log event text is empty");
  }
  if (context) event.context = text::sanitize_utf8(*context);
  event.source_file = std::move(source_file);
  event.sequence_no = sequence_no;
  return event;
}

const std::string* GraphNode::property(std::string_view key) const {
  for (const auto& p : properties) {
    if (p.key == key) return &p.value;
  }
  return nullptr;
}

const GraphNode* KnowledgeGraph::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

bool graph_is_empty(const KnowledgeGraph& g) { return g.nodes.empty() && g.relationships.empty(); }

std::string to_string(const StructuralError& e) {
  switch (e.kind) {
    case StructuralErrorKind::kDuplicateNodeId:
      return "DuplicateNodeId(" + e.node_id + ")";
    case StructuralErrorKind::kDanglingEndpoint:
      return "DanglingEndpoint(" + e.node_id + ")";
    case StructuralErrorKind::kDuplicatePropertyKey:
      return "DuplicatePropertyKey(" + e.node_id + "." + e.property_key + ")";
  }
  return "StructuralError";
}

std::vector<StructuralError> structural_check(const KnowledgeGraph& g) {
  std::vector<StructuralError> errors;

  std::unordered_set<std::string> seen;
  std::set<std::string> reported;
  for (const auto& node : g.nodes) {
    if (!seen.insert(node.id).second && reported.insert(node.id).second) {
      errors.push_back({StructuralErrorKind::kDuplicateNodeId, node.id, {}, 0});
    }
  }

  for (std::size_t i = 0; i < g.relationships.size(); ++i) {
    const auto& rel = g.relationships[i];
    if (!seen.contains(rel.source_id)) {
      errors.push_back({StructuralErrorKind::kDanglingEndpoint, rel.source_id, {}, i});
    }
    if (!seen.contains(rel.target_id)) {
      errors.push_back({StructuralErrorKind::kDanglingEndpoint, rel.target_id, {}, i});
    }
  }

  for (const auto& node : g.nodes) {
    std::unordered_set<std::string> keys;
    std::set<std::string> dup;
    for (const auto& p : node.properties) {
      if (!keys.insert(p.key).second && dup.insert(p.key).second) {
        errors.push_back({StructuralErrorKind::kDuplicatePropertyKey, node.id, p.key, 0});
      }
    }
  }
  return errors;
}

}  // namespace logkg
