#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "logkg/embedding.hpp"
#include "logkg/example_index.hpp"

namespace logkg {

struct MmrConfig {
  double lambda = 0.5;        // 1 = pure relevance, 0 = pure diversity
  std::size_t k = 4;          // examples injected into the prompt
  std::size_t fetch_pool = 20;  // nearest neighbours handed to MMR

  /// Throws ConfigError unless lambda in [0,1] and 1 <= k <= fetch_pool.
  void check() const;
};

/// Greedy Maximal Marginal Relevance over precomputed similarities.
///
/// The first pick is the candidate with the highest relevance. Each later pick
/// maximizes  lambda * relevance[d] - (1 - lambda) * max_{s in selected} pairwise(d, s)
/// over the remaining candidates. Ties go to the lower index. Stops after k picks
/// or when candidates run out. Returns candidate indices in pick order.
std::vector<std::size_t> mmr_order(std::span<const double> relevance,
                                   const std::function<double(std::size_t, std::size_t)>& pairwise,
                                   double lambda, std::size_t k);

/// MMR with cosine similarity. Throws DimensionMismatch.
std::vector<std::size_t> mmr_select_indices(const Embedding& query, std::span<const Embedding> candidates,
                                            const MmrConfig& cfg);

std::vector<ExampleRecord> mmr_select(const Embedding& query, std::span<const ExampleRecord> candidates,
                                      const MmrConfig& cfg);

}  // namespace logkg
