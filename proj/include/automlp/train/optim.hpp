#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "automlp/model/params.hpp"
#include "automlp/numkit/tensor.hpp"

namespace automlp::train {

using numkit::Tensor2;

// -[log sigmoid(pos) + sum_j log(1 - sigmoid(neg_j))], evaluated in
// log-sigmoid form so it stays finite for any finite scores.
double bce_loss(double pos_score, std::span<const double> neg_scores);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // L2 penalty added to the gradient before the moment updates.
  double weight_decay = 0.0;

  void validate() const;
};

struct AdamState {
  std::vector<Tensor2> m;
  std::vector<Tensor2> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam step. The state is sized on first use and must
// keep matching shapes afterwards.
void adam_update(std::span<Tensor2* const> params, std::span<const Tensor2> grads,
                 AdamState& state, const AdamConfig& cfg);
// Same, over every tensor of `params`; padding embedding rows are re-zeroed.
void adam_update(model::ModelParams& params, std::span<const Tensor2> grads, AdamState& state,
                 const AdamConfig& cfg);

}  // namespace automlp::train
