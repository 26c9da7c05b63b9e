#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logkg/embedding.hpp"

namespace logkg {

/// kKeepDistant retains a candidate whose minimum cosine distance to the already
/// selected events is >= threshold. kKeepClose flips the comparison (< threshold).
/// The first candidate is always retained under either rule.
enum class DistanceRule { kKeepDistant, kKeepClose };

std::string_view to_string(DistanceRule rule);
DistanceRule distance_rule_from_string(std::string_view s);

struct SamplerConfig {
  std::size_t pool_per_file = 100;
  std::size_t fewshot = 10;
  std::size_t validation = 10;
  std::size_t total = 70;
  double threshold = 0.7;
  std::uint64_t seed = 0;
  DistanceRule rule = DistanceRule::kKeepDistant;

  /// Throws ConfigError unless fewshot + validation < total and threshold is in [0, 2].
  void check() const;
};

struct SampleEvent {
  std::string text;
  std::string source_file;
  std::size_t line_no = 0;  // 1-based

  bool operator==(const SampleEvent&) const = default;
};

struct DatasetSplit {
  std::vector<SampleEvent> fewshot;
  std::vector<SampleEvent> validation;
  std::vector<SampleEvent> test;

  bool operator==(const DatasetSplit&) const = default;
};

/// First `pool_per_file` non-blank lines of each file, in file order. Throws ParseError
/// if a file cannot be read.
std::vector<SampleEvent> build_pool(std::span<const std::filesystem::path> files, std::size_t pool_per_file);

/// Fisher-Yates permutation of [0, n) driven by mt19937_64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Draws candidates in seeded order and keeps those passing the distance rule until
/// cfg.total are selected: the first cfg.fewshot go to fewshot, the next
/// cfg.validation to validation, the rest to test. Throws PoolExhausted with the
/// number selected when the pool runs out first.
DatasetSplit sample_dataset(std::span<const SampleEvent> pool, std::span<const Embedding> embeddings,
                            const SamplerConfig& cfg);
DatasetSplit sample_dataset(std::span<const SampleEvent> pool, const Embedder& embedder, const SamplerConfig& cfg);

}  // namespace logkg
