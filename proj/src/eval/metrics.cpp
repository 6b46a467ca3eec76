#include "automlp/eval/metrics.hpp"

#include <cmath>

#include "automlp/errors.hpp"
#include "automlp/model/forward.hpp"

namespace automlp::eval {

std::size_t rank_of_target(std::span<const double> scores, std::size_t target_position) {
  if (target_position >= scores.size()) {
    throw ArgumentError("target position " + std::to_string(target_position) +
                        " outside a list of " + std::to_string(scores.size()) + " scores");
  }
  const double target = scores[target_position];
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (j != target_position && scores[j] >= target) ++rank;
  return rank;
}

RankingMetrics metrics_at_n(std::span<const std::size_t> ranks, std::size_t n) {
  if (ranks.empty()) throw ArgumentError("metrics_at_n: no ranks given");
  RankingMetrics m;
  m.n = n;
  m.count = ranks.size();
  for (std::size_t r : ranks) {
    if (r < 1) throw ArgumentError("ranks are 1-based");
    if (r > n) continue;
    m.hr += 1.0;
    m.ndcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    m.mrr += 1.0 / static_cast<double>(r);
  }
  const double c = static_cast<double>(ranks.size());
  m.hr /= c;
  m.ndcg /= c;
  m.mrr /= c;
  return m;
}

std::vector<std::uint32_t> candidate_lists(const data::SequenceDataset& ds, data::Split split,
                                           const data::PopularityDist& pop, const EvalConfig& cfg) {
  const auto& examples = ds.examples(split);
  const std::size_t width = 1 + cfg.num_negatives;
  std::vector<std::uint32_t> out;
  out.reserve(examples.size() * width);
  const std::uint64_t split_seed = numkit::mix_seed(cfg.seed, static_cast<std::uint64_t>(split) + 1);
  for (const data::Example& ex : examples) {
    numkit::Rng rng(numkit::mix_seed(split_seed, ex.user));
    const auto exclude = ds.interacted(ex.user);
    out.push_back(ex.target);
    const auto neg = data::sample_negatives(pop, exclude, cfg.num_negatives, rng, cfg.sampling);
    out.insert(out.end(), neg.begin(), neg.end());
  }
  return out;
}

std::vector<std::size_t> rank_split(const model::Model& m, const data::SequenceDataset& ds,
                                    data::Split split, std::span<const std::uint32_t> candidates,
                                    const EvalConfig& cfg) {
  const auto& examples = ds.examples(split);
  const std::size_t width = 1 + cfg.num_negatives;
  if (candidates.size() != examples.size() * width) {
    throw ArgumentError("candidate lists do not match the split size");
  }
  if (examples.empty()) throw DataError("split '" + std::string(data::split_name(split)) + "' is empty");
  const std::size_t T = m.config.max_len;
  if (ds.max_len != T) {
    throw ConfigError("dataset window " + std::to_string(ds.max_len) +
                      " differs from model max_len " + std::to_string(T));
  }
  const std::size_t bs = std::max<std::size_t>(1, cfg.batch_size);
  std::vector<std::size_t> ranks;
  ranks.reserve(examples.size());
  std::vector<std::uint32_t> inputs;
  for (std::size_t start = 0; start < examples.size(); start += bs) {
    const std::size_t end = std::min(examples.size(), start + bs);
    inputs.clear();
    for (std::size_t i = start; i < end; ++i)
      inputs.insert(inputs.end(), examples[i].input.begin(), examples[i].input.end());
    numkit::Tape tape;
    const model::BoundParams b = model::bind(tape, m.params, m.arch, false);
    model::ForwardContext ctx;
    const auto h = model::hidden_batch(tape, b, m.config, inputs, ds.item_features, ctx);
    const auto scores = model::candidate_scores(
        tape, b, h, candidates.subspan(start * width, (end - start) * width), width);
    const auto& sv = tape.value(scores);
    for (std::size_t r = 0; r < sv.rows(); ++r) ranks.push_back(rank_of_target(sv.row(r), 0));
  }
  return ranks;
}

std::vector<std::size_t> rank_split(const model::Model& m, const data::SequenceDataset& ds,
                                    data::Split split, const data::PopularityDist& pop,
                                    const EvalConfig& cfg) {
  const auto cands = candidate_lists(ds, split, pop, cfg);
  return rank_split(m, ds, split, cands, cfg);
}

RankingMetrics evaluate_split(const model::Model& m, const data::SequenceDataset& ds,
                              data::Split split, const data::PopularityDist& pop,
                              const EvalConfig& cfg) {
  const auto ranks = rank_split(m, ds, split, pop, cfg);
  return metrics_at_n(ranks, cfg.cutoff);
}

nlohmann::json metrics_record(const RankingMetrics& m, data::Split split, std::uint64_t seed) {
  return {{"split", data::split_name(split)}, {"n", m.n},         {"hr", m.hr},
          {"ndcg", m.ndcg},                   {"mrr", m.mrr},     {"count", m.count},
          {"seed", seed}};
}

}  // namespace automlp::eval
