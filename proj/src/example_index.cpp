#include "logkg/example_index.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>

#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"

namespace logkg {

std::string_view to_string(ExampleOrigin origin) {
  return origin == ExampleOrigin::kManual ? "MANUAL" : "GENERATED";
}

ExampleOrigin example_origin_from_string(std::string_view s) {
  if (s == "MANUAL") return ExampleOrigin::kManual;
  if (s == "GENERATED") return ExampleOrigin::kGenerated;
  throw ParseError("unknown example origin '" + std::string(s) + "'");
}

ExampleRecord make_example(std::string log_text, std::optional<std::string> context,
                           KnowledgeGraph graph, ExampleOrigin origin, const Embedder& embedder) {
  LogEvent probe;
  probe.raw_text = log_text;
  probe.context = context;
  ExampleRecord r;
  r.embedding = embedder.embed(probe.embedding_text());
  r.log_text = std::move(log_text);
  r.context = std::move(context);
  r.graph = std::move(graph);
  r.origin = origin;
  return r;
}

nlohmann::json example_to_json(const ExampleRecord& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["log_text"] = r.log_text;
  j["context"] = r.context ? nlohmann::ordered_json(*r.context) : nlohmann::ordered_json(nullptr);
  j["origin"] = to_string(r.origin);
  j["graph"] = nlohmann::ordered_json::parse(serialize_graph(r.graph));
  j["embedding"] = r.embedding.values;
  return nlohmann::json::parse(j.dump());
}

ExampleRecord example_from_json(const nlohmann::json& j, const Embedder* embedder) {
  ExampleRecord r;
  try {
    r.log_text = j.at("log_text").get<std::string>();
    if (j.contains("context") && !j.at("context").is_null()) r.context = j.at("context").get<std::string>();
    r.origin = j.contains("origin") ? example_origin_from_string(j.at("origin").get<std::string>())
                                    : ExampleOrigin::kManual;
    auto parsed = graph_from_json(j.at("graph"));
    if (!parsed.graph) throw ParseError("example graph: " + parsed.errors.front());
    r.graph = std::move(*parsed.graph);
    if (j.contains("embedding") && !j.at("embedding").is_null()) {
      r.embedding.values = j.at("embedding").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed example record: ") + e.what());
  }
  if (r.log_text.empty()) throw ParseError("example record has empty log_text");
  if (r.embedding.values.empty()) {
    if (!embedder) throw ParseError("example record has no embedding and no embedder was given");
    LogEvent probe;
    probe.raw_text = r.log_text;
    probe.context = r.context;
    r.embedding = embedder->embed(probe.embedding_text());
  }
  return r;
}

ExampleIndex::ExampleIndex(const ExampleIndex& other) {
  std::shared_lock lock(other.mutex_);
  records_ = other.records_;
  by_identity_ = other.by_identity_;
}

ExampleIndex& ExampleIndex::operator=(const ExampleIndex& other) {
  if (this == &other) return *this;
  std::unique_lock mine(mutex_, std::defer_lock);
  std::shared_lock theirs(other.mutex_, std::defer_lock);
  std::lock(mine, theirs);
  records_ = other.records_;
  by_identity_ = other.by_identity_;
  return *this;
}

std::string ExampleIndex::identity_key(const ExampleRecord& r) {
  std::string key = r.log_text;
  key += '\x1f';
  key += r.context ? "1" + *r.context : "0";
  key += '\x1f';
  key += serialize_graph(r.graph);
  return key;
}

ExampleIndex::Handle ExampleIndex::add_example(ExampleRecord record) {
  std::unique_lock lock(mutex_);
  auto key = identity_key(record);
  if (const auto it = by_identity_.find(key); it != by_identity_.end()) return it->second;
  if (!records_.empty() && records_.front().embedding.dim() != record.embedding.dim()) {
    throw DimensionMismatch("example embedding dimension " + std::to_string(record.embedding.dim()) +
                            " does not match index dimension " +
                            std::to_string(records_.front().embedding.dim()));
  }
  const Handle h = records_.size();
  records_.push_back(std::move(record));
  by_identity_.emplace(std::move(key), h);
  return h;
}

std::vector<ExampleRecord> ExampleIndex::search_pool(const Embedding& query, std::size_t n,
                                                     OriginFilter filter) const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (filter == OriginFilter::kManualOnly && records_[i].origin != ExampleOrigin::kManual) continue;
    scored.emplace_back(cosine_sim(query, records_[i].embedding), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t take = std::min(n, scored.size());
  std::vector<ExampleRecord> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(records_[scored[i].second]);
  return out;
}

std::size_t ExampleIndex::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

ExampleRecord ExampleIndex::at(Handle h) const {
  std::shared_lock lock(mutex_);
  if (h >= records_.size()) throw UnknownId("example handle " + std::to_string(h));
  return records_[h];
}

void ExampleIndex::save_jsonl(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageFailure("cannot write example index " + path.string());
  for (const auto& r : records_) out << example_to_json(r).dump() << '\n';
  if (!out) throw StorageFailure("failed writing example index " + path.string());
}

ExampleIndex ExampleIndex::load_jsonl(const std::filesystem::path& path, const Embedder* embedder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open example index " + path.string());
  ExampleIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      index.add_example(example_from_json(nlohmann::json::parse(line), embedder));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return index;
}

}  // namespace logkg
