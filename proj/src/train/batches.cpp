#include "automlp/train/batches.hpp"

#include <numeric>

#include "automlp/errors.hpp"

namespace automlp::train {

BatchSampler::BatchSampler(const data::SequenceDataset& ds, std::size_t negatives,
                           data::Replacement mode)
    : ds_(ds), pop_(data::PopularityDist::from_dataset(ds)), negatives_(negatives), mode_(mode) {
  interacted_.reserve(ds.num_users());
  for (std::size_t u = 1; u <= ds.num_users(); ++u)
    interacted_.push_back(ds.interacted(static_cast<std::uint32_t>(u)));
}

Batch BatchSampler::make(data::Split split, std::span<const std::size_t> example_ids,
                         numkit::Rng& rng) const {
  const auto& examples = ds_.examples(split);
  Batch b;
  b.size = example_ids.size();
  b.width = 1 + negatives_;
  b.inputs.reserve(b.size * ds_.max_len);
  b.candidates.reserve(b.size * b.width);
  for (std::size_t id : example_ids) {
    const data::Example& ex = examples.at(id);
    b.inputs.insert(b.inputs.end(), ex.input.begin(), ex.input.end());
    b.candidates.push_back(ex.target);
    const auto neg = data::sample_negatives(pop_, interacted_[ex.user - 1], negatives_, rng, mode_);
    b.candidates.insert(b.candidates.end(), neg.begin(), neg.end());
  }
  return b;
}

LossAndGrads loss_and_grads(const model::Model& m, const Batch& batch,
                            model::ItemFeatures features, model::ForwardContext& ctx) {
  numkit::Tape tape;
  const model::BoundParams b = model::bind(tape, m.params, m.arch);
  const auto h = model::hidden_batch(tape, b, m.config, batch.inputs, features, ctx);
  const auto loss =
      numkit::ad::bce_mean(tape, model::candidate_scores(tape, b, h, batch.candidates, batch.width));
  tape.backward(loss);
  LossAndGrads out;
  out.loss = tape.value(loss)(0, 0);
  out.weight_grads.reserve(b.weights.size());
  for (const auto& w : b.weights) out.weight_grads.push_back(tape.grad(w));
  out.alpha_grad = tape.grad(b.alpha);
  return out;
}

double batch_loss(const model::Model& m, const Batch& batch, model::ItemFeatures features,
                  model::ForwardContext& ctx) {
  numkit::Tape tape;
  const model::BoundParams b = model::bind(tape, m.params, m.arch, false);
  const auto h = model::hidden_batch(tape, b, m.config, batch.inputs, features, ctx);
  return tape.value(numkit::ad::bce_mean(
      tape, model::candidate_scores(tape, b, h, batch.candidates, batch.width)))(0, 0);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, numkit::Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
  return idx;
}

}  // namespace automlp::train
