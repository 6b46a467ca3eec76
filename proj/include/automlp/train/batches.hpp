#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "automlp/data/sampling.hpp"
#include "automlp/data/sequences.hpp"
#include "automlp/model/forward.hpp"
#include "automlp/model/model.hpp"

namespace automlp::train {

// A scored mini-batch: `size` input windows stacked into `inputs`, and for
// each one `width` candidates (positive first, then negatives).
struct Batch {
  std::vector<std::uint32_t> inputs;
  std::vector<std::uint32_t> candidates;
  std::size_t size = 0;
  std::size_t width = 0;
};

// Builds batches with popularity-sampled negatives excluding each user's
// own interactions.
class BatchSampler {
 public:
  BatchSampler(const data::SequenceDataset& ds, std::size_t negatives,
               data::Replacement mode = data::Replacement::kWithout);

  Batch make(data::Split split, std::span<const std::size_t> example_ids, numkit::Rng& rng) const;
  const data::PopularityDist& popularity() const noexcept { return pop_; }
  const data::SequenceDataset& dataset() const noexcept { return ds_; }

 private:
  const data::SequenceDataset& ds_;
  data::PopularityDist pop_;
  std::vector<std::vector<std::uint32_t>> interacted_;
  std::size_t negatives_;
  data::Replacement mode_;
};

struct LossAndGrads {
  double loss = 0.0;
  // One per ModelParams tensor, in ModelParams::for_each order.
  std::vector<numkit::Tensor2> weight_grads;
  numkit::Tensor2 alpha_grad;
};

// Mean BCE over the batch and its gradients with respect to every weight
// and to alpha.
LossAndGrads loss_and_grads(const model::Model& m, const Batch& batch,
                            model::ItemFeatures features, model::ForwardContext& ctx);
double batch_loss(const model::Model& m, const Batch& batch, model::ItemFeatures features,
                  model::ForwardContext& ctx);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, numkit::Rng& rng);

}  // namespace automlp::train
