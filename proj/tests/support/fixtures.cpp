#include "fixtures.hpp"

#include <sys/wait.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace logkg::testing {

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("logkg-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path source_dir() { return LOGKG_SOURCE_DIR; }

std::filesystem::path fixture(std::string_view relative) { return source_dir() / "tests" / "fixtures" / relative; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

KnowledgeGraph event_graph(std::string message, std::string level) {
  KnowledgeGraph g;
  g.nodes.push_back({"e", "Event", {{"eventMessage", std::move(message)}, {"logLevel", std::move(level)}}});
  return g;
}

KnowledgeGraph event_with_user(std::string message, std::string user) {
  auto g = event_graph(std::move(message));
  g.nodes.push_back({"u", "UserIdentity", {{"userUID", std::move(user)}}});
  g.relationships.push_back({"e", "u", "hasUser"});
  return g;
}

KnowledgeGraph graph_missing_level(std::string message) {
  KnowledgeGraph g;
  g.nodes.push_back({"e", "Event", {{"eventMessage", std::move(message)}}});
  return g;
}

std::string render_conversation(const Conversation& c) {
  std::string out;
  for (const auto& m : c) {
    out += "=== ";
    out += to_string(m.role);
    out += " ===\n";
    out += m.content;
    out += "\n";
  }
  return out;
}

std::string check_golden(std::string_view name, std::string_view actual) {
  const auto path = source_dir() / "tests" / "golden" / name;
  const char* update = std::getenv("LOGKG_UPDATE_GOLDEN");
  if (update && std::string_view(update) == "1") {
    write_text(path, actual);
    return {};
  }
  if (!std::filesystem::exists(path)) return "golden file missing: " + path.string();
  const auto expected = read_text(path);
  if (expected == actual) return {};
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  return "golden mismatch in " + path.string() + " at byte " + std::to_string(i);
}

int run_command(const std::string& command, std::string* out) {
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return -1;
  std::array<char, 4096> buf{};
  std::string captured;
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) captured.append(buf.data(), n);
  const int status = ::pclose(pipe);
  if (out) *out = std::move(captured);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace logkg::testing
