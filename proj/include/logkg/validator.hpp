#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/model.hpp"
#include "logkg/schema.hpp"

namespace logkg {

enum class ViolationCode {
  kUnknownClass,
  kUnknownProperty,
  kUnknownRelationship,
  kDomainMismatch,
  kRangeMismatch,
  kCardinalityMin,
  kCardinalityMax,
  kValueNotInEnum,
  kNotExactlyOneAnchor,
  kDisconnectedNode,
  kDanglingEndpoint,
  kDuplicateNodeId,
};

inline constexpr ViolationCode kAllViolationCodes[] = {
    ViolationCode::kUnknownClass,      ViolationCode::kUnknownProperty,
    ViolationCode::kUnknownRelationship, ViolationCode::kDomainMismatch,
    ViolationCode::kRangeMismatch,     ViolationCode::kCardinalityMin,
    ViolationCode::kCardinalityMax,    ViolationCode::kValueNotInEnum,
    ViolationCode::kNotExactlyOneAnchor, ViolationCode::kDisconnectedNode,
    ViolationCode::kDanglingEndpoint,  ViolationCode::kDuplicateNodeId,
};

/// Upper-snake name, e.g. "NOT_EXACTLY_ONE_ANCHOR".
std::string_view to_string(ViolationCode code);
std::optional<ViolationCode> violation_code_from_string(std::string_view name);

struct Violation {
  ViolationCode code;
  std::string subject;  // node id, "(source, type, target)", or "graph"
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Non-blocking findings, e.g. an eventMessage that differs from the raw log.
struct ValidationWarning {
  std::string subject;
  std::string message;

  bool operator==(const ValidationWarning&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<ValidationWarning> warnings;

  bool conforms() const { return violations.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

struct ValidationOptions {
  /// When set, an Event eventMessage that differs from this text yields a warning.
  std::optional<std::string> expected_event_message;
};

/// Checks, in order: structural defects (duplicate ids, dangling endpoints), class
/// membership, property membership, cardinality, enumerations, relationship types,
/// domain/range, exactly one anchor node, connectivity of the undirected view.
/// Within a check, violations are ordered by node id.
ValidationReport validate(const KnowledgeGraph& g, const OntologySchema& s,
                          const ValidationOptions& options = {});

/// Fraction of non-conforming reports. Throws EmptyInput on an empty list.
double violation_rate(std::span<const ValidationReport> reports);

nlohmann::json report_to_json(const ValidationReport& r);
ValidationReport report_from_json(const nlohmann::json& j);

std::string relationship_subject(const GraphRelationship& r);

}  // namespace logkg
