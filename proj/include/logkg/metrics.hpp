#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/model.hpp"
#include "logkg/schema.hpp"

namespace logkg {

/// (subject, predicate, object) after normalization. Subjects, and objects of
/// relationship triples, are canonical node keys.
struct CanonicalTriple {
  std::string subject;
  std::string predicate;
  std::string object;
  bool object_is_node = false;

  auto operator<=>(const CanonicalTriple&) const = default;
  bool operator==(const CanonicalTriple&) const = default;
};

using TripleSet = std::set<CanonicalTriple>;

/// node_type + "#" + SHA-256 over the node's (key, value) pairs, each trimmed and
/// NFC-normalized, then sorted. Nodes with equal type and properties share a key.
std::string canonical_node_key(const GraphNode& node);

/// One triple per data property and one per relationship. Relationships with a
/// missing endpoint are skipped; duplicate node ids resolve to the first node.
TripleSet canonical_triples(const KnowledgeGraph& g);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Set-based scores; each ratio is 0 when its denominator set is empty.
Prf prf_from_sets(const TripleSet& generated, const TripleSet& gold);
Prf precision_recall_f1(const KnowledgeGraph& generated, const KnowledgeGraph& gold);

struct EvalItem {
  std::string event_id;
  KnowledgeGraph generated;
  KnowledgeGraph gold;
};

struct EventScore {
  std::string event_id;
  Prf prf;
  bool conforms = false;
  std::size_t generated_triples = 0;
  std::size_t gold_triples = 0;
  std::size_t matched_triples = 0;
};

/// Scores of one run over a corpus, macro-averaged over events.
struct RunScores {
  std::vector<EventScore> events;
  Prf macro;
  double shacl_violation_rate = 0.0;
};

/// Validates each generated graph as given, so empty graphs count as violating.
/// Throws EmptyInput on an empty corpus.
RunScores score_run(std::span<const EvalItem> items, const OntologySchema& schema);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 for a single value
};

/// Throws EmptyInput.
MeanSd mean_sd(std::span<const double> values);

struct MetricsReport {
  std::string label;
  MeanSd precision;
  MeanSd recall;
  MeanSd f1;
  MeanSd shacl_violation_rate;
  std::vector<RunScores> runs;
  /// Reserved for an externally computed judge score; never filled in here.
  std::optional<double> judge_score;
};

/// Mean and SD over runs. Throws EmptyInput.
MetricsReport aggregate(std::span<const RunScores> runs, std::string label);

nlohmann::ordered_json metrics_report_to_json(const MetricsReport& r);

/// Header plus one row per report:
/// label,precision_mean,precision_sd,recall_mean,recall_sd,f1_mean,f1_sd,
/// shacl_violation_rate_mean,shacl_violation_rate_sd
std::string metrics_to_csv(std::span<const MetricsReport> reports);

/// Gold layout: <dir>/<id>.log (the event) next to <dir>/<id>.json (its graph).
/// Predictions: <dir>/<id>.json; a missing prediction scores as the empty graph.
/// Throws ParseError on malformed graphs and EmptyInput when no gold pair exists.
std::vector<EvalItem> load_eval_corpus(const std::filesystem::path& gold_dir,
                                       const std::filesystem::path& predictions_dir);

}  // namespace logkg
