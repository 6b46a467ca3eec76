#include "automlp/model/forward.hpp"

#include "automlp/errors.hpp"

namespace automlp::model {

namespace ad = numkit::ad;
using numkit::Tensor2;

namespace {

BoundLayer bind_layer(Tape& t, const MixerLayerParams& p, std::vector<Var>* all) {
  BoundLayer b{t.leaf(p.seq_W1), t.leaf(p.seq_W2), t.leaf(p.seq_gamma), t.leaf(p.seq_beta),
               t.leaf(p.ch_W3),  t.leaf(p.ch_W4),  t.leaf(p.ch_gamma),  t.leaf(p.ch_beta)};
  if (all != nullptr) {
    all->insert(all->end(), {b.seq_W1, b.seq_W2, b.seq_gamma, b.seq_beta, b.ch_W3, b.ch_W4,
                             b.ch_gamma, b.ch_beta});
  }
  return b;
}

Var apply_dropout(Tape& t, Var h, ForwardContext& ctx) {
  if (!ctx.training || ctx.dropout == 0.0) return h;
  if (ctx.rng == nullptr) throw ArgumentError("training forward pass with dropout needs an rng");
  const Tensor2& hv = t.value(h);
  return ad::mul(t, h, t.constant(numkit::dropout_mask(hv.rows(), hv.cols(), ctx.dropout, *ctx.rng)));
}

Var mlp(Tape& t, Var x, Var w_in, Var w_out, const ModelConfig& cfg, ForwardContext& ctx) {
  Var h = ad::activation(t, ad::matmul_nt(t, x, w_in), cfg.activation);
  h = apply_dropout(t, h, ctx);
  return ad::matmul_nt(t, h, w_out);
}

std::size_t batch_rows(Tape& t, Var x, std::size_t block) {
  const std::size_t rows = t.value(x).rows();
  if (block == 0 || rows % block != 0) {
    throw ShapeError("input with " + std::to_string(rows) + " rows is not a stack of length-" +
                     std::to_string(block) + " sequences");
  }
  return rows / block;
}

}  // namespace

BoundParams bind(Tape& t, const ModelParams& p, const ArchWeights& arch, bool requires_grad) {
  std::vector<Var> leaves;
  p.for_each([&](const std::string&, const Tensor2& tensor) {
    leaves.push_back(t.leaf(tensor, requires_grad));
  });
  leaves.push_back(t.leaf(arch.alpha, requires_grad));
  return bind_leaves(p, leaves);
}

BoundParams bind_leaves(const ModelParams& p, std::span<const Var> leaves) {
  std::size_t next = 0;
  auto take = [&]() {
    if (next >= leaves.size()) throw ArgumentError("bind: too few leaves for the model");
    return leaves[next++];
  };
  auto take_layer = [&]() {
    BoundLayer b;
    for (Var* v : {&b.seq_W1, &b.seq_W2, &b.seq_gamma, &b.seq_beta, &b.ch_W3, &b.ch_W4,
                   &b.ch_gamma, &b.ch_beta})
      *v = take();
    return b;
  };
  BoundParams b;
  b.item_embedding = take();
  for (std::size_t i = 0; i < p.feature_embeddings.size(); ++i) b.feature_embeddings.push_back(take());
  if (!p.fusion_W.empty()) {
    b.fusion_W = take();
    b.fusion_b = take();
  }
  for (std::size_t l = 0; l < p.long_stack.size(); ++l) b.long_stack.push_back(take_layer());
  for (const auto& stack : p.candidate_stacks) {
    std::vector<BoundLayer> bs;
    for (std::size_t l = 0; l < stack.size(); ++l) bs.push_back(take_layer());
    b.candidate_stacks.push_back(std::move(bs));
  }
  b.out_W = take();
  b.out_b = take();
  b.weights.assign(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(next));
  b.alpha = take();
  if (next != leaves.size()) throw ArgumentError("bind: too many leaves for the model");
  return b;
}

Var embed_batch(Tape& t, const BoundParams& p, const ModelConfig& cfg,
                std::span<const std::uint32_t> inputs, ItemFeatures features) {
  const Var items = ad::gather_rows(t, p.item_embedding, inputs, true);
  if (!cfg.has_features()) return items;
  const std::size_t nf = cfg.feature_cardinalities.size();
  if (features.size() != cfg.num_items + 1) {
    throw ConfigError("item feature table has " + std::to_string(features.size()) +
                      " rows, expected " + std::to_string(cfg.num_items + 1));
  }
  Var fused = items;
  std::vector<std::uint32_t> codes(inputs.size());
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto item = inputs[i];
      if (item >= features.size()) {
        throw LookupError("item index " + std::to_string(item) + " out of range");
      }
      codes[i] = item == 0 ? 0 : features[item].at(f);
    }
    fused = ad::concat_cols(t, fused, ad::gather_rows(t, p.feature_embeddings[f], codes, true));
  }
  Var out = ad::add_row(t, ad::matmul_nt(t, fused, p.fusion_W), p.fusion_b);
  Tensor2 mask(inputs.size(), cfg.dim, 1.0);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i] == 0) std::fill(mask.row(i).begin(), mask.row(i).end(), 0.0);
  return ad::mul(t, out, t.constant(std::move(mask)));
}

Var mix_sequence(Tape& t, Var x, std::size_t window, const BoundLayer& layer,
                 const ModelConfig& cfg, ForwardContext& ctx) {
  batch_rows(t, x, window);
  if (cfg.norm_axis == NormAxis::kChannel) {
    const Var normed = ad::layer_norm_rows(t, x, layer.seq_gamma, layer.seq_beta);
    const Var per_channel = ad::block_transpose(t, normed, window);  // (B*D) x window
    const Var z = mlp(t, per_channel, layer.seq_W1, layer.seq_W2, cfg, ctx);
    return ad::add(t, x, ad::block_transpose(t, z, cfg.dim));
  }
  const Var xt = ad::block_transpose(t, x, window);
  const Var normed = ad::layer_norm_rows(t, xt, layer.seq_gamma, layer.seq_beta);
  const Var z = mlp(t, normed, layer.seq_W1, layer.seq_W2, cfg, ctx);
  return ad::block_transpose(t, ad::add(t, xt, z), cfg.dim);
}

Var mix_channel(Tape& t, Var x, const BoundLayer& layer, const ModelConfig& cfg,
                ForwardContext& ctx) {
  const Var normed = ad::layer_norm_rows(t, x, layer.ch_gamma, layer.ch_beta);
  return ad::add(t, x, mlp(t, normed, layer.ch_W3, layer.ch_W4, cfg, ctx));
}

Var srsmlp_stack(Tape& t, Var x, std::size_t window, std::span<const BoundLayer> stack,
                 const ModelConfig& cfg, ForwardContext& ctx) {
  if (stack.empty()) throw ConfigError("SRSMLP stack needs at least one layer");
  for (const BoundLayer& layer : stack) {
    if (!cfg.disable_sequence_mixer) x = mix_sequence(t, x, window, layer, cfg, ctx);
    if (!cfg.disable_channel_mixer) x = mix_channel(t, x, layer, cfg, ctx);
  }
  return x;
}

Var interest_batch(Tape& t, Var emb, std::size_t window, std::span<const BoundLayer> stack,
                   const ModelConfig& cfg, ForwardContext& ctx) {
  if (window == 0 || window > cfg.max_len) {
    throw ArgumentError("window " + std::to_string(window) + " exceeds sequence length " +
                        std::to_string(cfg.max_len));
  }
  batch_rows(t, emb, cfg.max_len);
  const Var slice = window == cfg.max_len
                        ? emb
                        : ad::block_rows(t, emb, cfg.max_len, cfg.max_len - window, window);
  const Var out = srsmlp_stack(t, slice, window, stack, cfg, ctx);
  return ad::block_rows(t, out, window, window - 1, 1);
}

Var mixture_batch(Tape& t, Var emb, const BoundParams& p, const ModelConfig& cfg,
                  ForwardContext& ctx) {
  if (p.candidate_stacks.size() != cfg.candidates.size() ||
      t.value(p.alpha).cols() != cfg.candidates.size()) {
    throw ConfigError("candidate stacks (" + std::to_string(p.candidate_stacks.size()) +
                      "), architecture weights (" + std::to_string(t.value(p.alpha).cols()) +
                      ") and candidate windows (" + std::to_string(cfg.candidates.size()) +
                      ") disagree");
  }
  std::vector<Var> outs;
  for (std::size_t m = 0; m < cfg.candidates.size(); ++m)
    outs.push_back(interest_batch(t, emb, cfg.candidates[m], p.candidate_stacks[m], cfg, ctx));
  return ad::weighted_sum(t, ad::softmax_rows(t, p.alpha), outs);
}

Var fuse_batch(Tape& t, Var x_short, Var x_long, const BoundParams& p) {
  const Var normed = ad::layer_norm_rows(t, ad::concat_cols(t, x_short, x_long), std::nullopt,
                                         std::nullopt);
  return ad::add_row(t, ad::matmul_nt(t, normed, p.out_W), p.out_b);
}

Var hidden_batch(Tape& t, const BoundParams& p, const ModelConfig& cfg,
                 std::span<const std::uint32_t> inputs, ItemFeatures features,
                 ForwardContext& ctx) {
  if (inputs.empty() || inputs.size() % cfg.max_len != 0) {
    throw ShapeError("batch of " + std::to_string(inputs.size()) +
                     " indices is not a stack of length-" + std::to_string(cfg.max_len) +
                     " sequences");
  }
  const Var emb = embed_batch(t, p, cfg, inputs, features);
  const Var x_long = interest_batch(t, emb, cfg.max_len, p.long_stack, cfg, ctx);
  const Var x_short = mixture_batch(t, emb, p, cfg, ctx);
  return fuse_batch(t, x_short, x_long, p);
}

Var candidate_scores(Tape& t, const BoundParams& p, Var h,
                     std::span<const std::uint32_t> candidates, std::size_t n) {
  if (n == 0) throw ArgumentError("candidate list is empty");
  const Var cand = ad::gather_rows(t, p.item_embedding, candidates, true);
  return ad::row_dots(t, h, cand, n);
}

// ---- single-sequence operations -------------------------------------------

namespace {

std::vector<BoundLayer> bind_stack(Tape& t, std::span<const MixerLayerParams> stack) {
  std::vector<BoundLayer> out;
  for (const auto& layer : stack) out.push_back(bind_layer(t, layer, nullptr));
  return out;
}

}  // namespace

Tensor2 embed(std::span<const std::uint32_t> input, const ModelParams& params,
              const ModelConfig& cfg, ItemFeatures features) {
  Tape t;
  BoundParams b;
  b.item_embedding = t.leaf(params.item_embedding);
  for (const Tensor2& f : params.feature_embeddings) b.feature_embeddings.push_back(t.leaf(f));
  if (!params.fusion_W.empty()) {
    b.fusion_W = t.leaf(params.fusion_W);
    b.fusion_b = t.leaf(params.fusion_b);
  }
  return t.value(embed_batch(t, b, cfg, input, features));
}

Tensor2 sequence_mixer(const Tensor2& x_dt, const MixerLayerParams& layer, const ModelConfig& cfg,
                       ForwardContext ctx) {
  if (x_dt.rows() != cfg.dim || x_dt.cols() != layer.seq_W1.cols()) {
    throw ShapeError("sequence_mixer: input " + x_dt.shape_string() + " does not match layer " +
                     numkit::shape_string(cfg.dim, layer.seq_W1.cols()));
  }
  Tape t;
  const BoundLayer b = bind_layer(t, layer, nullptr);
  const Var x = t.constant(numkit::transpose(x_dt));
  return numkit::transpose(t.value(mix_sequence(t, x, x_dt.cols(), b, cfg, ctx)));
}

Tensor2 channel_mixer(const Tensor2& x, const MixerLayerParams& layer, const ModelConfig& cfg,
                      ForwardContext ctx) {
  if (x.cols() != layer.ch_W3.cols()) {
    throw ShapeError("channel_mixer: input " + x.shape_string() + " does not match D=" +
                     std::to_string(layer.ch_W3.cols()));
  }
  Tape t;
  const BoundLayer b = bind_layer(t, layer, nullptr);
  return t.value(mix_channel(t, t.constant(x), b, cfg, ctx));
}

Tensor2 srsmlp_forward(const Tensor2& x, std::span<const MixerLayerParams> stack,
                       const ModelConfig& cfg, ForwardContext ctx) {
  Tape t;
  const auto b = bind_stack(t, stack);
  return t.value(srsmlp_stack(t, t.constant(x), x.rows(), b, cfg, ctx));
}

Tensor2 interest_forward(const Tensor2& x, std::size_t window,
                         std::span<const MixerLayerParams> stack, const ModelConfig& cfg,
                         ForwardContext ctx) {
  if (window == 0 || window > x.rows()) {
    throw ArgumentError("window " + std::to_string(window) + " exceeds sequence length " +
                        std::to_string(x.rows()));
  }
  ModelConfig local = cfg;
  local.max_len = x.rows();
  Tape t;
  const auto b = bind_stack(t, stack);
  return t.value(interest_batch(t, t.constant(x), window, b, local, ctx));
}

Tensor2 mixture_short_term(const Tensor2& x, const ArchWeights& arch,
                           const std::vector<std::vector<MixerLayerParams>>& stacks,
                           const ModelConfig& cfg, ForwardContext ctx) {
  if (stacks.size() != arch.size() || arch.alpha.cols() != arch.size()) {
    throw ConfigError(std::to_string(stacks.size()) + " candidate stacks for " +
                      std::to_string(arch.size()) + " architecture weights");
  }
  ModelConfig local = cfg;
  local.max_len = x.rows();
  local.candidates = arch.candidates;
  Tape t;
  BoundParams b;
  for (const auto& s : stacks) b.candidate_stacks.push_back(bind_stack(t, s));
  b.alpha = t.leaf(arch.alpha);
  return t.value(mixture_batch(t, t.constant(x), b, local, ctx));
}

Tensor2 fuse_output(const Tensor2& x_short, const Tensor2& x_long, const ModelParams& params) {
  if (!x_short.same_shape(x_long) || x_short.rows() != 1 ||
      2 * x_short.cols() != params.out_W.cols()) {
    throw ShapeError("fuse_output: inputs " + x_short.shape_string() + " and " +
                     x_long.shape_string() + " do not match out_W " +
                     params.out_W.shape_string());
  }
  Tape t;
  BoundParams b;
  b.out_W = t.leaf(params.out_W);
  b.out_b = t.leaf(params.out_b);
  return t.value(fuse_batch(t, t.constant(x_short), t.constant(x_long), b));
}

ItemScores score_items(const Tensor2& h, std::span<const std::uint32_t> candidates,
                       const ModelParams& params) {
  if (candidates.empty()) throw ArgumentError("score_items: candidate list is empty");
  if (h.rows() != 1 || h.cols() != params.item_embedding.cols()) {
    throw ShapeError("score_items: hidden vector " + h.shape_string() + " does not match D=" +
                     std::to_string(params.item_embedding.cols()));
  }
  Tape t;
  BoundParams b;
  b.item_embedding = t.leaf(params.item_embedding);
  const Var s = candidate_scores(t, b, t.constant(h), candidates, candidates.size());
  ItemScores out;
  const auto row = t.value(s).row(0);
  out.dots.assign(row.begin(), row.end());
  out.probabilities = numkit::softmax(out.dots);
  return out;
}

}  // namespace automlp::model
