#include "logkg/graph_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <tuple>

#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"

namespace logkg {

using ordered_json = nlohmann::ordered_json;

ordered_json stored_graph_to_json(const StoredGraph& sg) {
  ordered_json j = ordered_json::object();
  j["graph_id"] = sg.graph_id;
  j["pipeline_run_id"] = sg.pipeline_run_id;
  j["created_at_ms"] = sg.created_at_ms;
  j["source_log"] = sg.source_log;
  j["context"] = sg.context ? ordered_json(*sg.context) : ordered_json(nullptr);
  j["embedding"] = sg.embedding.values;
  j["graph"] = ordered_json::parse(serialize_graph(sg.graph));
  return j;
}

namespace {

std::string render_record(const StoredGraph& sg) { return stored_graph_to_json(sg).dump(); }

std::string errno_text() { return std::strerror(errno); }

std::string read_all(int fd) {
  std::string out;
  char buf[1 << 16];
  off_t offset = 0;
  for (;;) {
    const ssize_t n = ::pread(fd, buf, sizeof buf, offset);
    if (n < 0) throw StorageFailure("read failed: " + errno_text());
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
    offset += n;
  }
  return out;
}

int open_or_throw(const std::filesystem::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags | O_CLOEXEC, 0644);
  if (fd < 0) throw StorageFailure("cannot open " + path.string() + ": " + errno_text());
  return fd;
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

StoredGraph stored_graph_from_json(const ordered_json& j) {
  StoredGraph sg;
  try {
    sg.graph_id = j.at("graph_id").get<std::string>();
    sg.pipeline_run_id = j.at("pipeline_run_id").get<std::string>();
    sg.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    sg.source_log = j.at("source_log").get<std::string>();
    if (!j.at("context").is_null()) sg.context = j.at("context").get<std::string>();
    sg.embedding.values = j.at("embedding").get<std::vector<double>>();
    auto parsed = graph_from_json(nlohmann::json::parse(j.at("graph").dump()));
    if (!parsed.graph) throw ParseError("stored graph: " + parsed.errors.front());
    sg.graph = std::move(*parsed.graph);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed stored graph record: ") + e.what());
  }
  return sg;
}

FileGraphStore::FileGraphStore(std::filesystem::path dir, Mode mode) : dir_(std::move(dir)), mode_(mode) {
  try {
    if (mode_ == Mode::kReadWrite) {
      std::error_code ec;
      std::filesystem::create_directories(dir_, ec);
      if (ec) throw StorageFailure("cannot create store directory " + dir_.string() + ": " + ec.message());
      lock_fd_ = open_or_throw(dir_ / "LOCK", O_RDWR | O_CREAT);
      if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        throw StorageFailure("store " + dir_.string() + " is already open by another writer");
      }
      data_fd_ = open_or_throw(data_path(), O_RDWR | O_CREAT);
      index_fd_ = open_or_throw(index_path(), O_RDWR | O_CREAT);
    } else {
      if (!std::filesystem::is_directory(dir_)) throw StorageFailure("no store at " + dir_.string());
    }
    load();
  } catch (...) {
    close_fd(index_fd_);
    close_fd(data_fd_);
    close_fd(lock_fd_);
    throw;
  }
}

FileGraphStore::~FileGraphStore() {
  close_fd(index_fd_);
  close_fd(data_fd_);
  close_fd(lock_fd_);
}

void FileGraphStore::load() {
  std::string index_text;
  std::string data_text;
  if (mode_ == Mode::kReadWrite) {
    index_text = read_all(index_fd_);
    data_text = read_all(data_fd_);
  } else {
    if (!std::filesystem::exists(index_path())) return;
    int ifd = open_or_throw(index_path(), O_RDONLY);
    int dfd = -1;
    try {
      index_text = read_all(ifd);
      dfd = open_or_throw(data_path(), O_RDONLY);
      data_text = read_all(dfd);
    } catch (...) {
      close_fd(ifd);
      close_fd(dfd);
      throw;
    }
    close_fd(ifd);
    close_fd(dfd);
  }

  std::map<std::string, StoredGraph> loaded;
  std::uint64_t committed_data = 0;
  std::size_t committed_index = 0;
  std::size_t pos = 0;
  while (pos < index_text.size()) {
    const auto nl = index_text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn index line: not committed
    const std::string line = index_text.substr(pos, nl - pos);
    pos = nl + 1;
    nlohmann::json entry;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    try {
      entry = nlohmann::json::parse(line);
      offset = entry.at("offset").get<std::uint64_t>();
      length = entry.at("length").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw StorageFailure("corrupt index line in " + index_path().string() + ": " + e.what());
    }
    if (offset + length + 1 > data_text.size()) {
      throw StorageFailure("index points past the end of " + data_path().string());
    }
    StoredGraph sg;
    try {
      sg = stored_graph_from_json(ordered_json::parse(data_text.substr(offset, length)));
    } catch (const std::exception& e) {
      throw StorageFailure("corrupt record at offset " + std::to_string(offset) + ": " + e.what());
    }
    if (sg.graph_id != entry.value("graph_id", std::string())) {
      throw StorageFailure("index and data disagree at offset " + std::to_string(offset));
    }
    loaded.emplace(sg.graph_id, std::move(sg));
    committed_data = std::max(committed_data, offset + length + 1);
    committed_index = pos;
  }

  if (mode_ == Mode::kReadWrite) {
    if (::ftruncate(data_fd_, static_cast<off_t>(committed_data)) != 0 ||
        ::ftruncate(index_fd_, static_cast<off_t>(committed_index)) != 0) {
      throw StorageFailure("cannot discard uncommitted tail: " + errno_text());
    }
  }
  data_end_ = committed_data;
  std::unique_lock lock(mutex_);
  records_ = std::move(loaded);
}

void FileGraphStore::append_line(int fd, const std::string& line, const char* what) {
  const off_t end = ::lseek(fd, 0, SEEK_END);
  if (end < 0) throw StorageFailure(std::string("seek failed on ") + what + ": " + errno_text());
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::pwrite(fd, line.data() + written, line.size() - written, end + static_cast<off_t>(written));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StorageFailure(std::string("write failed on ") + what + ": " + errno_text());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) throw StorageFailure(std::string("fsync failed on ") + what + ": " + errno_text());
}

std::string FileGraphStore::put(const StoredGraph& sg) {
  if (mode_ != Mode::kReadWrite) throw StorageFailure("store opened read-only");
  if (sg.graph_id.empty()) throw StorageFailure("graph_id must not be empty");
  std::unique_lock lock(mutex_);
  if (records_.contains(sg.graph_id)) throw DuplicateId("graph id '" + sg.graph_id + "' already stored");

  const std::string record = render_record(sg);
  const std::uint64_t offset = data_end_;
  append_line(data_fd_, record + "\n", "data file");
  data_end_ = offset + record.size() + 1;

  ordered_json entry = ordered_json::object();
  entry["graph_id"] = sg.graph_id;
  entry["offset"] = offset;
  entry["length"] = record.size();
  append_line(index_fd_, entry.dump() + "\n", "index file");

  records_.emplace(sg.graph_id, sg);
  return sg.graph_id;
}

StoredGraph FileGraphStore::get(const std::string& graph_id) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(graph_id);
  if (it == records_.end()) throw UnknownId("unknown graph id '" + graph_id + "'");
  return it->second;
}

bool FileGraphStore::contains(const std::string& graph_id) const {
  std::shared_lock lock(mutex_);
  return records_.contains(graph_id);
}

std::vector<std::string> FileGraphStore::list_ids(const std::optional<std::string>& run_id) const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<std::int64_t, std::string>> keyed;
  for (const auto& [id, sg] : records_) {
    if (run_id && sg.pipeline_run_id != *run_id) continue;
    keyed.emplace_back(sg.created_at_ms, id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (auto& [_, id] : keyed) out.push_back(std::move(id));
  return out;
}

std::size_t FileGraphStore::count() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

void FileGraphStore::refresh() {
  if (mode_ == Mode::kReadWrite) return;  // the writer's view is always current
  load();
}

}  // namespace logkg
