#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logkg/embedding.hpp"
#include "logkg/model.hpp"

namespace logkg {

/// A validated graph with the provenance it was extracted from.
struct StoredGraph {
  std::string graph_id;
  KnowledgeGraph graph;
  std::string source_log;
  std::optional<std::string> context;
  Embedding embedding;
  std::int64_t created_at_ms = 0;  // Unix epoch, milliseconds
  std::string pipeline_run_id;

  bool operator==(const StoredGraph&) const = default;
};

/// On-disk record: {graph_id, pipeline_run_id, created_at_ms, source_log, context|null, embedding, graph}.
nlohmann::ordered_json stored_graph_to_json(const StoredGraph& sg);
StoredGraph stored_graph_from_json(const nlohmann::ordered_json& j);

/// Write-once graph persistence.
class GraphStore {
 public:
  virtual ~GraphStore() = default;

  /// Throws DuplicateId if the id exists, StorageFailure on I/O errors.
  virtual std::string put(const StoredGraph& sg) = 0;
  /// Throws UnknownId.
  virtual StoredGraph get(const std::string& graph_id) const = 0;
  virtual bool contains(const std::string& graph_id) const = 0;
  /// Ordered by created_at, then graph_id. An empty filter lists every run.
  virtual std::vector<std::string> list_ids(const std::optional<std::string>& run_id = std::nullopt) const = 0;
  virtual std::size_t count() const = 0;
};

/// Directory-backed store:
///   graphs.jsonl  append-only records, one JSON object per line
///   graphs.idx    commit log, one {"graph_id","offset","length"} line per record
///   LOCK          held with flock() by the single writer
/// A record is visible only once its index line is complete; a torn tail left by a
/// crash is discarded when the writer reopens the store.
class FileGraphStore final : public GraphStore {
 public:
  enum class Mode { kReadWrite, kReadOnly };

  /// Throws StorageFailure if the directory cannot be used or another writer holds it.
  explicit FileGraphStore(std::filesystem::path dir, Mode mode = Mode::kReadWrite);
  ~FileGraphStore() override;

  FileGraphStore(const FileGraphStore&) = delete;
  FileGraphStore& operator=(const FileGraphStore&) = delete;

  std::string put(const StoredGraph& sg) override;
  StoredGraph get(const std::string& graph_id) const override;
  bool contains(const std::string& graph_id) const override;
  std::vector<std::string> list_ids(const std::optional<std::string>& run_id = std::nullopt) const override;
  std::size_t count() const override;

  /// Picks up records committed by a writer since this store was opened.
  void refresh();

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path data_path() const { return dir_ / "graphs.jsonl"; }
  std::filesystem::path index_path() const { return dir_ / "graphs.idx"; }

 private:
  void load();
  void append_line(int fd, const std::string& line, const char* what);

  std::filesystem::path dir_;
  Mode mode_;
  int lock_fd_ = -1;
  int data_fd_ = -1;
  int index_fd_ = -1;
  std::uint64_t data_end_ = 0;

  mutable std::shared_mutex mutex_;
  std::map<std::string, StoredGraph> records_;
};

}  // namespace logkg
