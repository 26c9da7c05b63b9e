#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/embedding.hpp"
#include "logkg/model.hpp"

namespace logkg {

enum class ExampleOrigin { kManual, kGenerated };

std::string_view to_string(ExampleOrigin origin);
ExampleOrigin example_origin_from_string(std::string_view s);

/// A few-shot example: log text, optional context, its graph and embedding.
struct ExampleRecord {
  std::string log_text;
  std::optional<std::string> context;
  KnowledgeGraph graph;
  Embedding embedding;
  ExampleOrigin origin = ExampleOrigin::kManual;

  bool operator==(const ExampleRecord&) const = default;
};

/// Embeds log_text (+ context) with the given embedder.
ExampleRecord make_example(std::string log_text, std::optional<std::string> context,
                           KnowledgeGraph graph, ExampleOrigin origin, const Embedder& embedder);

nlohmann::json example_to_json(const ExampleRecord& r);

/// Missing "embedding" fields are filled in with `embedder` when one is given;
/// otherwise they are a ParseError.
ExampleRecord example_from_json(const nlohmann::json& j, const Embedder* embedder);

enum class OriginFilter { kAny, kManualOnly };

/// Exhaustive-scan vector index over few-shot examples. Concurrent readers,
/// one writer at a time.
class ExampleIndex {
 public:
  using Handle = std::size_t;

  ExampleIndex() = default;
  ExampleIndex(const ExampleIndex& other);
  ExampleIndex& operator=(const ExampleIndex& other);

  /// Adding an identical (log_text, context, graph) again returns the existing handle.
  /// Throws DimensionMismatch if the embedding disagrees with the index dimension.
  Handle add_example(ExampleRecord record);

  /// Top min(n, |matching records|) by cosine similarity, descending; ties keep insertion order.
  std::vector<ExampleRecord> search_pool(const Embedding& query, std::size_t n,
                                         OriginFilter filter = OriginFilter::kAny) const;

  std::size_t size() const;
  ExampleRecord at(Handle h) const;

  void save_jsonl(const std::filesystem::path& path) const;
  /// Throws ParseError on malformed lines.
  static ExampleIndex load_jsonl(const std::filesystem::path& path, const Embedder* embedder = nullptr);

 private:
  static std::string identity_key(const ExampleRecord& r);

  mutable std::shared_mutex mutex_;
  std::vector<ExampleRecord> records_;
  std::map<std::string, Handle> by_identity_;
};

}  // namespace logkg
