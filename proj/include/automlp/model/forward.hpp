#pragma once

// Forward computation on a differentiation tape. Batches are row-stacked: a
// batch of B sequences of length T is a (B*T) x D matrix whose rows
// [b*T, (b+1)*T) hold sequence b, oldest first.

#include <cstdint>
#include <span>
#include <vector>

#include "automlp/model/config.hpp"
#include "automlp/model/params.hpp"
#include "automlp/numkit/autodiff.hpp"

namespace automlp::model {

using numkit::Tape;
using numkit::Var;

struct BoundLayer {
  Var seq_W1, seq_W2, seq_gamma, seq_beta;
  Var ch_W3, ch_W4, ch_gamma, ch_beta;
};

// Tape leaves for one ModelParams/ArchWeights pair. `weights` lists every
// parameter leaf in ModelParams::for_each order.
struct BoundParams {
  Var item_embedding;
  std::vector<Var> feature_embeddings;
  Var fusion_W, fusion_b;
  std::vector<BoundLayer> long_stack;
  std::vector<std::vector<BoundLayer>> candidate_stacks;
  Var out_W, out_b;
  Var alpha;
  std::vector<Var> weights;
};

// The tape references `params` and `arch` in place; both must outlive it.
// With requires_grad false nothing is recorded for backward, which is the
// cheap path for scoring.
BoundParams bind(Tape& tape, const ModelParams& params, const ArchWeights& arch,
                 bool requires_grad = true);
// Uses existing leaves: one per tensor in ModelParams::for_each order, then
// alpha. `params` only supplies the structure.
BoundParams bind_leaves(const ModelParams& params, std::span<const Var> leaves);

struct ForwardContext {
  bool training = false;
  // Inverted dropout after every mixer activation, applied only in training.
  double dropout = 0.0;
  // Dropout stream; required when training with dropout > 0.
  numkit::Rng* rng = nullptr;
};

// item_features[i] lists the categorical codes of item i; ignored unless the
// config declares feature columns.
using ItemFeatures = std::span<const std::vector<std::uint32_t>>;

// (B*T) x D embedded batch; padding positions are zero rows.
Var embed_batch(Tape& t, const BoundParams& p, const ModelConfig& cfg,
                std::span<const std::uint32_t> inputs, ItemFeatures features);

// x is (B*window) x D. Both mixers are residual: x + W_out g(W_in LN(.)).
Var mix_sequence(Tape& t, Var x, std::size_t window, const BoundLayer& layer,
                 const ModelConfig& cfg, ForwardContext& ctx);
Var mix_channel(Tape& t, Var x, const BoundLayer& layer, const ModelConfig& cfg,
                ForwardContext& ctx);
Var srsmlp_stack(Tape& t, Var x, std::size_t window, std::span<const BoundLayer> stack,
                 const ModelConfig& cfg, ForwardContext& ctx);
// Runs `stack` over the last `window` rows of each length-T block of `emb` and
// returns each block's final row: B x D.
Var interest_batch(Tape& t, Var emb, std::size_t window, std::span<const BoundLayer> stack,
                   const ModelConfig& cfg, ForwardContext& ctx);
// sum_m softmax(alpha)_m * interest(k_m).
Var mixture_batch(Tape& t, Var emb, const BoundParams& p, const ModelConfig& cfg,
                  ForwardContext& ctx);
// out_W * LN(concat(x_s, x_l)) + out_b per row.
Var fuse_batch(Tape& t, Var x_short, Var x_long, const BoundParams& p);
// h_T for a batch: B x D.
Var hidden_batch(Tape& t, const BoundParams& p, const ModelConfig& cfg,
                 std::span<const std::uint32_t> inputs, ItemFeatures features,
                 ForwardContext& ctx);
// out[b, j] = h[b] . E[candidates[b*n + j]]
Var candidate_scores(Tape& t, const BoundParams& p, Var h,
                     std::span<const std::uint32_t> candidates, std::size_t n);

// ---- single-sequence operations -------------------------------------------

numkit::Tensor2 embed(std::span<const std::uint32_t> input, const ModelParams& params,
                      const ModelConfig& cfg, ItemFeatures features = {});
// X is D x T (one row per channel); the result has the same layout.
numkit::Tensor2 sequence_mixer(const numkit::Tensor2& x_dt, const MixerLayerParams& layer,
                               const ModelConfig& cfg, ForwardContext ctx = {});
// X is T x D.
numkit::Tensor2 channel_mixer(const numkit::Tensor2& x, const MixerLayerParams& layer,
                              const ModelConfig& cfg, ForwardContext ctx = {});
numkit::Tensor2 srsmlp_forward(const numkit::Tensor2& x, std::span<const MixerLayerParams> stack,
                               const ModelConfig& cfg, ForwardContext ctx = {});
// Final row of the stack applied to the last `window` rows of x (1 x D).
numkit::Tensor2 interest_forward(const numkit::Tensor2& x, std::size_t window,
                                 std::span<const MixerLayerParams> stack, const ModelConfig& cfg,
                                 ForwardContext ctx = {});
numkit::Tensor2 mixture_short_term(const numkit::Tensor2& x, const ArchWeights& arch,
                                   const std::vector<std::vector<MixerLayerParams>>& stacks,
                                   const ModelConfig& cfg, ForwardContext ctx = {});
numkit::Tensor2 fuse_output(const numkit::Tensor2& x_short, const numkit::Tensor2& x_long,
                            const ModelParams& params);

struct ItemScores {
  std::vector<double> dots;           // h . E_i per candidate
  std::vector<double> probabilities;  // softmax over the candidate list
};
ItemScores score_items(const numkit::Tensor2& h, std::span<const std::uint32_t> candidates,
                       const ModelParams& params);

}  // namespace automlp::model
