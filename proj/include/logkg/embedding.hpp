#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace logkg {

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  double norm() const;

  bool operator==(const Embedding&) const = default;
};

/// dot(a,b) / (|a| |b|). Throws DimensionMismatch or ZeroVector.
double cosine_sim(const Embedding& a, const Embedding& b);

/// 1 - cosine_sim(a, b).
double cosine_distance(const Embedding& a, const Embedding& b);

/// Text embedding backend. Implementations must be deterministic and return
/// unit-L2 vectors; embed() may be called concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  /// Throws EmptyInput for blank text; remote backends throw EmbedderUnavailable.
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
};

/// Lowercased runs of ASCII alphanumerics (bytes >= 0x80 count as word characters).
std::vector<std::string> tokenize(std::string_view text);

/// Reference embedder: feature-hashed token counts, L2-normalized. Needs no model files.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit HashingEmbedder(std::size_t dim = kDefaultDim);

  Embedding embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "hashing-" + std::to_string(dim_); }

  /// Bucket a token lands in.
  std::size_t bucket(std::string_view token) const;

 private:
  std::size_t dim_;
};

struct HttpEmbedderConfig {
  std::string endpoint;  // base URL, e.g. http://localhost:8080
  std::string path = "/v1/embeddings";
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

/// OpenAI-compatible /v1/embeddings client. Output is re-normalized to unit length.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config);

  Embedding embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_.load(); }
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpEmbedderConfig config_;
  mutable std::atomic<std::size_t> dim_{0};  // learned from the first response
};

/// Scales v to unit L2 norm. Throws ZeroVector.
void normalize_in_place(Embedding& v);

}  // namespace logkg
