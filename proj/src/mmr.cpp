#include "logkg/mmr.hpp"

#include <limits>

#include "logkg/errors.hpp"

namespace logkg {

void MmrConfig::check() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("MMR lambda must lie in [0, 1]");
  if (k == 0) throw ConfigError("MMR k must be positive");
  if (fetch_pool < k) throw ConfigError("MMR fetch_pool must be at least k");
}

std::vector<std::size_t> mmr_order(std::span<const double> relevance,
                                   const std::function<double(std::size_t, std::size_t)>& pairwise,
                                   double lambda, std::size_t k) {
  const std::size_t n = relevance.size();
  std::vector<std::size_t> picked;
  if (n == 0 || k == 0) return picked;

  std::vector<bool> taken(n, false);
  std::vector<double> redundancy(n, -std::numeric_limits<double>::infinity());

  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (relevance[i] > relevance[first]) first = i;
  }
  picked.push_back(first);
  taken[first] = true;

  while (picked.size() < std::min(k, n)) {
    const std::size_t last = picked.back();
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      redundancy[i] = std::max(redundancy[i], pairwise(i, last));
      const double score = lambda * relevance[i] - (1.0 - lambda) * redundancy[i];
      if (best == n || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    picked.push_back(best);
    taken[best] = true;
  }
  return picked;
}

std::vector<std::size_t> mmr_select_indices(const Embedding& query, std::span<const Embedding> candidates,
                                            const MmrConfig& cfg) {
  std::vector<double> relevance;
  relevance.reserve(candidates.size());
  for (const auto& c : candidates) relevance.push_back(cosine_sim(c, query));
  return mmr_order(
      relevance, [&](std::size_t a, std::size_t b) { return cosine_sim(candidates[a], candidates[b]); },
      cfg.lambda, cfg.k);
}

std::vector<ExampleRecord> mmr_select(const Embedding& query, std::span<const ExampleRecord> candidates,
                                      const MmrConfig& cfg) {
  std::vector<Embedding> embeddings;
  embeddings.reserve(candidates.size());
  for (const auto& c : candidates) embeddings.push_back(c.embedding);
  std::vector<ExampleRecord> out;
  for (std::size_t i : mmr_select_indices(query, embeddings, cfg)) out.push_back(candidates[i]);
  return out;
}

}  // namespace logkg
