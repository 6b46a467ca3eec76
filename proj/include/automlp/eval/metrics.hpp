#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "automlp/data/sampling.hpp"
#include "automlp/data/sequences.hpp"
#include "automlp/model/model.hpp"
#include "json.hpp"

namespace automlp::eval {

struct RankingMetrics {
  double hr = 0.0;
  double ndcg = 0.0;
  double mrr = 0.0;
  std::size_t n = 0;
  std::size_t count = 0;
};

// 1 + number of other candidates scoring at least as high as the target.
std::size_t rank_of_target(std::span<const double> scores, std::size_t target_position);

// Per example: HR = [r <= n], NDCG = [r <= n] / log2(r + 1), RR = [r <= n] / r.
RankingMetrics metrics_at_n(std::span<const std::size_t> ranks, std::size_t n);

struct EvalConfig {
  std::size_t num_negatives = 100;
  std::size_t cutoff = 10;
  std::uint64_t seed = 0;
  data::Replacement sampling = data::Replacement::kWithout;
  std::size_t batch_size = 256;
};

// Candidate lists for a split: target first, then negatives drawn from a
// generator seeded by (seed, split, user) so lists do not depend on batching.
std::vector<std::uint32_t> candidate_lists(const data::SequenceDataset& ds, data::Split split,
                                           const data::PopularityDist& pop, const EvalConfig& cfg);

// Ranks of the ground-truth item for every example of `split`.
std::vector<std::size_t> rank_split(const model::Model& m, const data::SequenceDataset& ds,
                                    data::Split split, const data::PopularityDist& pop,
                                    const EvalConfig& cfg);
// As above, reusing precomputed candidate lists.
std::vector<std::size_t> rank_split(const model::Model& m, const data::SequenceDataset& ds,
                                    data::Split split, std::span<const std::uint32_t> candidates,
                                    const EvalConfig& cfg);

RankingMetrics evaluate_split(const model::Model& m, const data::SequenceDataset& ds,
                              data::Split split, const data::PopularityDist& pop,
                              const EvalConfig& cfg);

// {split, n, hr, ndcg, mrr, count, seed}
nlohmann::json metrics_record(const RankingMetrics& m, data::Split split, std::uint64_t seed);

}  // namespace automlp::eval
