#include "logkg/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>

#include "logkg/errors.hpp"
#include "logkg/text.hpp"

namespace logkg {

std::string_view to_string(DistanceRule rule) {
  return rule == DistanceRule::kKeepDistant ? "keep-distant" : "keep-close";
}

DistanceRule distance_rule_from_string(std::string_view s) {
  if (s == "keep-distant") return DistanceRule::kKeepDistant;
  if (s == "keep-close") return DistanceRule::kKeepClose;
  throw ConfigError("unknown distance rule '" + std::string(s) + "' (expected keep-distant or keep-close)");
}

void SamplerConfig::check() const {
  if (pool_per_file == 0) throw ConfigError("pool per file must be positive");
  if (fewshot + validation >= total) throw ConfigError("total must exceed fewshot + validation");
  if (!(threshold >= 0.0 && threshold <= 2.0)) throw ConfigError("threshold must be in [0, 2]");
}

std::vector<SampleEvent> build_pool(std::span<const std::filesystem::path> files, std::size_t pool_per_file) {
  std::vector<SampleEvent> pool;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError("cannot read " + file.string());
    std::string line;
    std::size_t line_no = 0;
    std::size_t taken = 0;
    while (taken < pool_per_file && std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty()) continue;
      pool.push_back({text::sanitize_utf8(line), file.string(), line_no});
      ++taken;
    }
  }
  return pool;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Hand-rolled so the order does not depend on the standard library's shuffle.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

DatasetSplit sample_dataset(std::span<const SampleEvent> pool, std::span<const Embedding> embeddings,
                            const SamplerConfig& cfg) {
  cfg.check();
  if (pool.size() != embeddings.size()) throw DimensionMismatch("pool and embedding counts differ");

  std::vector<std::size_t> selected;
  for (const auto idx : seeded_permutation(pool.size(), cfg.seed)) {
    if (selected.size() == cfg.total) break;
    bool keep = true;
    if (!selected.empty()) {
      double min_distance = std::numeric_limits<double>::infinity();
      for (const auto s : selected) min_distance = std::min(min_distance, cosine_distance(embeddings[idx], embeddings[s]));
      keep = cfg.rule == DistanceRule::kKeepDistant ? min_distance >= cfg.threshold : min_distance < cfg.threshold;
    }
    if (keep) selected.push_back(idx);
  }
  if (selected.size() < cfg.total) {
    throw PoolExhausted("pool exhausted: selected " + std::to_string(selected.size()) + " of " +
                            std::to_string(cfg.total) + " events",
                        selected.size());
  }

  DatasetSplit split;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto& ev = pool[selected[i]];
    if (i < cfg.fewshot) {
      split.fewshot.push_back(ev);
    } else if (i < cfg.fewshot + cfg.validation) {
      split.validation.push_back(ev);
    } else {
      split.test.push_back(ev);
    }
  }
  return split;
}

DatasetSplit sample_dataset(std::span<const SampleEvent> pool, const Embedder& embedder, const SamplerConfig& cfg) {
  std::vector<Embedding> embeddings;
  embeddings.reserve(pool.size());
  for (const auto& ev : pool) embeddings.push_back(embedder.embed(ev.text));
  return sample_dataset(pool, embeddings, cfg);
}

}  // namespace logkg
