#include "logkg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "logkg/errors.hpp"
#include "logkg/text.hpp"

namespace logkg {

double Embedding::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double cosine_sim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine similarity of a zero vector");
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(sim, -1.0, 1.0);
}

double cosine_distance(const Embedding& a, const Embedding& b) { return 1.0 - cosine_sim(a, b); }

void normalize_in_place(Embedding& v) {
  const double n = v.norm();
  if (n == 0.0) throw ZeroVector("cannot normalize a zero vector");
  for (double& x : v.values) x /= n;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80U;
    if (word) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::size_t HashingEmbedder::bucket(std::string_view token) const {
  // 64-bit FNV-1a
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h % dim_);
}

Embedding HashingEmbedder::embed(std::string_view input) const {
  const std::string_view trimmed = text::trim(input);
  if (trimmed.empty()) throw EmptyInput("cannot embed empty text");
  auto tokens = tokenize(trimmed);
  // Punctuation-only text still needs a direction.
  if (tokens.empty()) tokens.emplace_back(trimmed);

  Embedding e;
  e.values.assign(dim_, 0.0);
  for (const auto& t : tokens) e.values[bucket(t)] += 1.0;
  normalize_in_place(e);
  return e;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("embedding endpoint is not configured");
}

Embedding HttpEmbedder::embed(std::string_view text) const {
  if (text::trim(text).empty()) throw EmptyInput("cannot embed empty text");
  const auto target = detail::split_url(config_.endpoint);
  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};

  auto res = client.Post(target.base_path + config_.path, headers, body.dump(), "application/json");
  if (!res) throw EmbedderUnavailable("embedding request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw EmbedderUnavailable("embedding endpoint returned HTTP " + std::to_string(res->status));
  }

  Embedding e;
  try {
    const auto j = nlohmann::json::parse(res->body);
    e.values = j.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw EmbedderUnavailable(std::string("malformed embedding response: ") + ex.what());
  }
  if (e.values.empty()) throw EmbedderUnavailable("embedding response was empty");
  std::size_t expected = 0;
  if (!dim_.compare_exchange_strong(expected, e.dim()) && expected != e.dim()) {
    throw DimensionMismatch("embedding endpoint changed dimension");
  }
  normalize_in_place(e);
  return e;
}

}  // namespace logkg
