#include "logkg/validator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "logkg/errors.hpp"

namespace logkg {

namespace {

struct CodeName {
  ViolationCode code;
  std::string_view name;
};

constexpr CodeName kCodeNames[] = {
    {ViolationCode::kUnknownClass, "UNKNOWN_CLASS"},
    {ViolationCode::kUnknownProperty, "UNKNOWN_PROPERTY"},
    {ViolationCode::kUnknownRelationship, "UNKNOWN_RELATIONSHIP"},
    {ViolationCode::kDomainMismatch, "DOMAIN_MISMATCH"},
    {ViolationCode::kRangeMismatch, "RANGE_MISMATCH"},
    {ViolationCode::kCardinalityMin, "CARDINALITY_MIN"},
    {ViolationCode::kCardinalityMax, "CARDINALITY_MAX"},
    {ViolationCode::kValueNotInEnum, "VALUE_NOT_IN_ENUM"},
    {ViolationCode::kNotExactlyOneAnchor, "NOT_EXACTLY_ONE_ANCHOR"},
    {ViolationCode::kDisconnectedNode, "DISCONNECTED_NODE"},
    {ViolationCode::kDanglingEndpoint, "DANGLING_ENDPOINT"},
    {ViolationCode::kDuplicateNodeId, "DUPLICATE_NODE_ID"},
};

using SortKey = std::tuple<std::string, std::string, std::string>;

struct Pending {
  SortKey key;
  Violation violation;
};

SortKey node_key(const std::string& id) { return {id, {}, {}}; }
SortKey rel_key(const GraphRelationship& r) { return {r.source_id, r.rel_type, r.target_id}; }

// Collects the findings of one check and flushes them ordered by subject.
class CheckGroup {
 public:
  explicit CheckGroup(std::vector<Violation>& out) : out_(out) {}
  CheckGroup(const CheckGroup&) = delete;
  CheckGroup& operator=(const CheckGroup&) = delete;
  ~CheckGroup() {
    std::stable_sort(items_.begin(), items_.end(),
                     [](const Pending& a, const Pending& b) { return a.key < b.key; });
    for (auto& p : items_) out_.push_back(std::move(p.violation));
  }

  void add(SortKey key, ViolationCode code, std::string subject, std::string message) {
    items_.push_back({std::move(key), {code, std::move(subject), std::move(message)}});
  }

 private:
  std::vector<Violation>& out_;
  std::vector<Pending> items_;
};

std::string dq(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string join(const std::vector<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ", ";
    out += dq(v);
  }
  return out;
}

}  // namespace

std::string_view to_string(ViolationCode code) {
  for (const auto& cn : kCodeNames) {
    if (cn.code == code) return cn.name;
  }
  return "UNKNOWN";
}

std::optional<ViolationCode> violation_code_from_string(std::string_view name) {
  for (const auto& cn : kCodeNames) {
    if (cn.name == name) return cn.code;
  }
  return std::nullopt;
}

std::string relationship_subject(const GraphRelationship& r) {
  return "(" + r.source_id + ", " + r.rel_type + ", " + r.target_id + ")";
}

ValidationReport validate(const KnowledgeGraph& g, const OntologySchema& s,
                          const ValidationOptions& options) {
  ValidationReport report;
  auto& out = report.violations;

  // First node per id; later duplicates are reported and otherwise shadowed.
  std::unordered_map<std::string, const GraphNode*> by_id;
  for (const auto& node : g.nodes) by_id.emplace(node.id, &node);

  {
    CheckGroup group(out);
    for (const auto& err : structural_check(g)) {
      if (err.kind == StructuralErrorKind::kDuplicateNodeId) {
        group.add(node_key(err.node_id), ViolationCode::kDuplicateNodeId, err.node_id,
                  "Node id " + dq(err.node_id) + " is used by more than one node.");
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& rel : g.relationships) {
      for (const auto* endpoint : {&rel.source_id, &rel.target_id}) {
        if (!by_id.contains(*endpoint)) {
          group.add(rel_key(rel), ViolationCode::kDanglingEndpoint, relationship_subject(rel),
                    "Relationship " + relationship_subject(rel) + " references node " +
                        dq(*endpoint) + ", which does not exist.");
        }
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& node : g.nodes) {
      if (!s.find_class(node.node_type)) {
        group.add(node_key(node.id), ViolationCode::kUnknownClass, node.id,
                  "Node " + dq(node.id) + " has type " + dq(node.node_type) +
                      ", which is not an ontology class.");
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& node : g.nodes) {
      const ClassSpec* cls = s.find_class(node.node_type);
      if (!cls) continue;
      std::set<std::string> reported;
      for (const auto& p : node.properties) {
        if (!cls->find_property(p.key) && reported.insert(p.key).second) {
          group.add(node_key(node.id), ViolationCode::kUnknownProperty, node.id,
                    "Property " + dq(p.key) + " is not allowed on " + dq(cls->name) +
                        " node " + dq(node.id) + ".");
        }
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& node : g.nodes) {
      const ClassSpec* cls = s.find_class(node.node_type);
      if (!cls) continue;
      std::map<std::string, std::size_t> counts;
      for (const auto& p : node.properties) ++counts[p.key];
      for (const auto& spec : cls->allowed_properties) {
        const std::size_t n = counts.contains(spec.key) ? counts[spec.key] : 0;
        if (n < spec.min_count) {
          group.add(node_key(node.id), ViolationCode::kCardinalityMin, node.id,
                    dq(cls->name) + " node " + dq(node.id) + " requires property " +
                        dq(spec.key) + " at least " + std::to_string(spec.min_count) +
                        " time(s); found " + std::to_string(n) + ".");
        }
      }
      for (const auto& spec : cls->allowed_properties) {
        const std::size_t n = counts.contains(spec.key) ? counts[spec.key] : 0;
        // Property keys are unique per node, so the effective bound is at most 1.
        const std::size_t max = spec.max_count ? std::min<std::size_t>(*spec.max_count, 1) : 1;
        if (n > max) {
          group.add(node_key(node.id), ViolationCode::kCardinalityMax, node.id,
                    dq(cls->name) + " node " + dq(node.id) + " allows property " +
                        dq(spec.key) + " at most " + std::to_string(max) +
                        " time(s); found " + std::to_string(n) + ".");
        }
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& node : g.nodes) {
      const ClassSpec* cls = s.find_class(node.node_type);
      if (!cls) continue;
      for (const auto& p : node.properties) {
        const PropertySpec* spec = cls->find_property(p.key);
        if (!spec || !spec->allowed_values) continue;
        const auto& allowed = *spec->allowed_values;
        if (std::find(allowed.begin(), allowed.end(), p.value) == allowed.end()) {
          group.add(node_key(node.id), ViolationCode::kValueNotInEnum, node.id,
                    "Property " + dq(p.key) + " of node " + dq(node.id) + " has value " +
                        dq(p.value) + "; allowed values are " + join(allowed) + ".");
        }
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& rel : g.relationships) {
      if (!s.find_relationship(rel.rel_type)) {
        group.add(rel_key(rel), ViolationCode::kUnknownRelationship, relationship_subject(rel),
                  "Relationship type " + dq(rel.rel_type) + " is not an ontology relationship.");
      }
    }
  }
  {
    CheckGroup group(out);
    for (const auto& rel : g.relationships) {
      const RelationshipSpec* spec = s.find_relationship(rel.rel_type);
      if (!spec) continue;
      if (auto it = by_id.find(rel.source_id); it != by_id.end() &&
                                               it->second->node_type != spec->source_class) {
        group.add(rel_key(rel), ViolationCode::kDomainMismatch, relationship_subject(rel),
                  "Relationship " + dq(rel.rel_type) + " must start at a " +
                      dq(spec->source_class) + " node, but " + dq(rel.source_id) +
                      " is " + dq(it->second->node_type) + ".");
      }
      if (auto it = by_id.find(rel.target_id); it != by_id.end() &&
                                               it->second->node_type != spec->target_class) {
        group.add(rel_key(rel), ViolationCode::kRangeMismatch, relationship_subject(rel),
                  "Relationship " + dq(rel.rel_type) + " must end at a " +
                      dq(spec->target_class) + " node, but " + dq(rel.target_id) +
                      " is " + dq(it->second->node_type) + ".");
      }
    }
  }

  const GraphNode* anchor = nullptr;
  {
    std::size_t anchors = 0;
    for (const auto& node : g.nodes) {
      if (node.node_type == s.anchor_class) {
        if (!anchor) anchor = &node;
        ++anchors;
      }
    }
    if (anchors != 1) {
      CheckGroup group(out);
      group.add(node_key({}), ViolationCode::kNotExactlyOneAnchor, "graph",
                "The graph must contain exactly one " + dq(s.anchor_class) + " node; found " +
                    std::to_string(anchors) + ".");
    }
  }
  if (!g.nodes.empty()) {
    CheckGroup group(out);
    std::unordered_map<std::string, std::vector<std::string>> adjacency;
    for (const auto& rel : g.relationships) {
      if (!by_id.contains(rel.source_id) || !by_id.contains(rel.target_id)) continue;
      adjacency[rel.source_id].push_back(rel.target_id);
      adjacency[rel.target_id].push_back(rel.source_id);
    }
    const std::string root = anchor ? anchor->id : g.nodes.front().id;
    std::set<std::string> reached{root};
    std::deque<std::string> frontier{root};
    while (!frontier.empty()) {
      const std::string current = std::move(frontier.front());
      frontier.pop_front();
      for (const auto& next : adjacency[current]) {
        if (reached.insert(next).second) frontier.push_back(next);
      }
    }
    std::set<std::string> reported;
    for (const auto& node : g.nodes) {
      if (!reached.contains(node.id) && reported.insert(node.id).second) {
        group.add(node_key(node.id), ViolationCode::kDisconnectedNode, node.id,
                  "Node " + dq(node.id) + " is not connected to the rest of the graph.");
      }
    }
  }

  if (options.expected_event_message) {
    for (const auto& node : g.nodes) {
      if (node.node_type != s.anchor_class) continue;
      const std::string* message = node.property("eventMessage");
      if (message && *message != *options.expected_event_message) {
        report.warnings.push_back(
            {node.id, "eventMessage of node " + dq(node.id) + " differs from the original event text."});
      }
    }
  }
  return report;
}

double violation_rate(std::span<const ValidationReport> reports) {
  if (reports.empty()) throw EmptyInput("violation_rate needs at least one report");
  const auto violating = std::count_if(reports.begin(), reports.end(),
                                       [](const ValidationReport& r) { return !r.conforms(); });
  return static_cast<double>(violating) / static_cast<double>(reports.size());
}

nlohmann::json report_to_json(const ValidationReport& r) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  out["conforms"] = r.conforms();
  out["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.violations) {
    nlohmann::ordered_json jv = nlohmann::ordered_json::object();
    jv["code"] = to_string(v.code);
    jv["subject"] = v.subject;
    jv["message"] = v.message;
    out["violations"].push_back(std::move(jv));
  }
  out["warnings"] = nlohmann::ordered_json::array();
  for (const auto& w : r.warnings) {
    nlohmann::ordered_json jw = nlohmann::ordered_json::object();
    jw["subject"] = w.subject;
    jw["message"] = w.message;
    out["warnings"].push_back(std::move(jw));
  }
  return nlohmann::json::parse(out.dump());
}

ValidationReport report_from_json(const nlohmann::json& j) {
  ValidationReport r;
  try {
    for (const auto& jv : j.at("violations")) {
      const auto code = violation_code_from_string(jv.at("code").get<std::string>());
      if (!code) throw ParseError("unknown violation code " + jv.at("code").dump());
      r.violations.push_back({*code, jv.at("subject").get<std::string>(), jv.at("message").get<std::string>()});
    }
    if (j.contains("warnings")) {
      for (const auto& jw : j.at("warnings")) {
        r.warnings.push_back({jw.at("subject").get<std::string>(), jw.at("message").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed validation report: ") + e.what());
  }
  return r;
}

}  // namespace logkg
