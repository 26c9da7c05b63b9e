#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "logkg/model.hpp"
#include "logkg/prompts.hpp"

namespace logkg::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path source_dir();
std::filesystem::path fixture(std::string_view relative);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

/// Event node with eventMessage and logLevel only.
KnowledgeGraph event_graph(std::string message, std::string level = "INFO");
/// event_graph plus a UserIdentity spoke.
KnowledgeGraph event_with_user(std::string message, std::string user);
/// event_graph with logLevel removed: one CARDINALITY_MIN violation.
KnowledgeGraph graph_missing_level(std::string message);

/// Human-readable dump used by golden files: one "=== role ===" header per message.
std::string render_conversation(const Conversation& c);

/// Compares `actual` with tests/golden/<name>. With LOGKG_UPDATE_GOLDEN=1 the file
/// is rewritten instead. Returns an empty string on match, else a diagnostic.
std::string check_golden(std::string_view name, std::string_view actual);

/// Runs a shell command, returning its exit status; stdout goes to `out` when given.
int run_command(const std::string& command, std::string* out = nullptr);

}  // namespace logkg::testing
