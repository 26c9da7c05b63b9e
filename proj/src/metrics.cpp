#include "logkg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "logkg/digest.hpp"
#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"
#include "logkg/text.hpp"
#include "logkg/validator.hpp"

namespace logkg {

using ordered_json = nlohmann::ordered_json;

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::size_t intersection_size(const TripleSet& a, const TripleSet& b) {
  std::size_t n = 0;
  for (const auto& t : a) n += b.contains(t) ? 1 : 0;
  return n;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json mean_sd_json(const MeanSd& m) { return ordered_json{{"mean", m.mean}, {"sd", m.sd}}; }

ordered_json prf_json(const Prf& p) {
  return ordered_json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

std::string canonical_node_key(const GraphNode& node) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(node.properties.size());
  for (const auto& p : node.properties) pairs.emplace_back(text::normalize(p.key), text::normalize(p.value));
  std::sort(pairs.begin(), pairs.end());
  // A JSON array of pairs is an unambiguous encoding for the digest.
  nlohmann::json encoded = nlohmann::json::array();
  for (const auto& [k, v] : pairs) encoded.push_back({k, v});
  return text::normalize(node.node_type) + "#" + sha256_hex(encoded.dump());
}

TripleSet canonical_triples(const KnowledgeGraph& g) {
  TripleSet out;
  std::map<std::string, std::string> key_of;
  for (const auto& node : g.nodes) {
    if (key_of.contains(node.id)) continue;
    const auto key = canonical_node_key(node);
    key_of.emplace(node.id, key);
    for (const auto& p : node.properties) {
      out.insert({key, text::normalize(p.key), text::normalize(p.value), false});
    }
  }
  for (const auto& r : g.relationships) {
    const auto s = key_of.find(r.source_id);
    const auto t = key_of.find(r.target_id);
    if (s == key_of.end() || t == key_of.end()) continue;
    out.insert({s->second, text::normalize(r.rel_type), t->second, true});
  }
  return out;
}

Prf prf_from_sets(const TripleSet& generated, const TripleSet& gold) {
  const auto hit = intersection_size(generated, gold);
  Prf p;
  p.precision = ratio(hit, generated.size());
  p.recall = ratio(hit, gold.size());
  p.f1 = harmonic(p.precision, p.recall);
  return p;
}

Prf precision_recall_f1(const KnowledgeGraph& generated, const KnowledgeGraph& gold) {
  return prf_from_sets(canonical_triples(generated), canonical_triples(gold));
}

RunScores score_run(std::span<const EvalItem> items, const OntologySchema& schema) {
  if (items.empty()) throw EmptyInput("cannot score an empty corpus");
  RunScores run;
  std::vector<ValidationReport> reports;
  reports.reserve(items.size());
  double sp = 0.0;
  double sr = 0.0;
  double sf = 0.0;
  for (const auto& item : items) {
    const auto g = canonical_triples(item.generated);
    const auto t = canonical_triples(item.gold);
    EventScore es;
    es.event_id = item.event_id;
    es.prf = prf_from_sets(g, t);
    es.generated_triples = g.size();
    es.gold_triples = t.size();
    es.matched_triples = intersection_size(g, t);
    reports.push_back(validate(item.generated, schema));
    es.conforms = reports.back().conforms();
    sp += es.prf.precision;
    sr += es.prf.recall;
    sf += es.prf.f1;
    run.events.push_back(std::move(es));
  }
  const double n = static_cast<double>(items.size());
  run.macro = {sp / n, sr / n, sf / n};
  run.shacl_violation_rate = violation_rate(reports);
  return run;
}

MeanSd mean_sd(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  MeanSd out;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

MetricsReport aggregate(std::span<const RunScores> runs, std::string label) {
  if (runs.empty()) throw EmptyInput("cannot aggregate zero runs");
  std::vector<double> p;
  std::vector<double> r;
  std::vector<double> f;
  std::vector<double> v;
  for (const auto& run : runs) {
    p.push_back(run.macro.precision);
    r.push_back(run.macro.recall);
    f.push_back(run.macro.f1);
    v.push_back(run.shacl_violation_rate);
  }
  MetricsReport report;
  report.label = std::move(label);
  report.precision = mean_sd(p);
  report.recall = mean_sd(r);
  report.f1 = mean_sd(f);
  report.shacl_violation_rate = mean_sd(v);
  report.runs.assign(runs.begin(), runs.end());
  return report;
}

ordered_json metrics_report_to_json(const MetricsReport& r) {
  ordered_json j = ordered_json::object();
  j["label"] = r.label;
  j["precision"] = mean_sd_json(r.precision);
  j["recall"] = mean_sd_json(r.recall);
  j["f1"] = mean_sd_json(r.f1);
  j["shacl_violation_rate"] = mean_sd_json(r.shacl_violation_rate);
  j["judge_score"] = r.judge_score ? ordered_json(*r.judge_score) : ordered_json(nullptr);
  ordered_json runs = ordered_json::array();
  for (const auto& run : r.runs) {
    ordered_json rj = ordered_json::object();
    rj["macro"] = prf_json(run.macro);
    rj["shacl_violation_rate"] = run.shacl_violation_rate;
    ordered_json events = ordered_json::array();
    for (const auto& e : run.events) {
      ordered_json ej = ordered_json::object();
      ej["event_id"] = e.event_id;
      ej["precision"] = e.prf.precision;
      ej["recall"] = e.prf.recall;
      ej["f1"] = e.prf.f1;
      ej["conforms"] = e.conforms;
      ej["generated_triples"] = e.generated_triples;
      ej["gold_triples"] = e.gold_triples;
      ej["matched_triples"] = e.matched_triples;
      events.push_back(std::move(ej));
    }
    rj["per_event"] = std::move(events);
    runs.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs);
  return j;
}

std::string metrics_to_csv(std::span<const MetricsReport> reports) {
  std::string out =
      "label,precision_mean,precision_sd,recall_mean,recall_sd,f1_mean,f1_sd,"
      "shacl_violation_rate_mean,shacl_violation_rate_sd\n";
  char buf[64];
  auto cell = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.6f", v);
    out += buf;
  };
  for (const auto& r : reports) {
    std::string label = r.label;
    if (label.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : label) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      label = quoted + "\"";
    }
    out += label;
    for (const auto* m : {&r.precision, &r.recall, &r.f1, &r.shacl_violation_rate}) {
      cell(m->mean);
      cell(m->sd);
    }
    out += '\n';
  }
  return out;
}

std::vector<EvalItem> load_eval_corpus(const std::filesystem::path& gold_dir,
                                       const std::filesystem::path& predictions_dir) {
  if (!std::filesystem::is_directory(gold_dir)) throw ParseError("gold directory not found: " + gold_dir.string());
  if (!std::filesystem::is_directory(predictions_dir)) {
    throw ParseError("predictions directory not found: " + predictions_dir.string());
  }
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(gold_dir)) {
    if (entry.path().extension() != ".json") continue;
    auto log = entry.path();
    log.replace_extension(".log");
    if (std::filesystem::exists(log)) ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw EmptyInput("no <id>.log / <id>.json pairs in " + gold_dir.string());

  std::vector<EvalItem> items;
  for (const auto& id : ids) {
    EvalItem item;
    item.event_id = id;
    try {
      item.gold = parse_graph_or_throw(read_file(gold_dir / (id + ".json")));
      const auto pred = predictions_dir / (id + ".json");
      if (std::filesystem::exists(pred)) item.generated = parse_graph_or_throw(read_file(pred));
    } catch (const ParseError& e) {
      throw ParseError(id + ": " + e.what());
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace logkg
