#include "automlp/model/params.hpp"

#include <algorithm>
#include <cmath>

#include "automlp/errors.hpp"

namespace automlp::model {
namespace {

std::size_t seq_norm_width(const ModelConfig& cfg, std::size_t window) {
  return cfg.norm_axis == NormAxis::kChannel ? cfg.dim : window;
}

Tensor2 uniform_fan_in(std::size_t rows, std::size_t cols, numkit::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Tensor2 t(rows, cols);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

Tensor2 embedding_table(std::size_t rows, std::size_t dim, numkit::Rng& rng) {
  Tensor2 t(rows, dim);
  for (std::size_t r = 1; r < rows; ++r)
    for (double& v : t.row(r)) v = 0.02 * rng.normal();
  return t;
}

MixerLayerParams init_layer(const ModelConfig& cfg, std::size_t window, numkit::Rng& rng) {
  MixerLayerParams p;
  p.seq_W1 = uniform_fan_in(cfg.seq_hidden, window, rng);
  p.seq_W2 = uniform_fan_in(window, cfg.seq_hidden, rng);
  p.seq_gamma = Tensor2(1, seq_norm_width(cfg, window), 1.0);
  p.seq_beta = Tensor2(1, seq_norm_width(cfg, window), 0.0);
  p.ch_W3 = uniform_fan_in(cfg.channel_hidden, cfg.dim, rng);
  p.ch_W4 = uniform_fan_in(cfg.dim, cfg.channel_hidden, rng);
  p.ch_gamma = Tensor2(1, cfg.dim, 1.0);
  p.ch_beta = Tensor2(1, cfg.dim, 0.0);
  return p;
}

void expect_shape(const Tensor2& t, std::size_t rows, std::size_t cols, const std::string& name) {
  if (t.rows() != rows || t.cols() != cols) {
    throw ShapeError("parameter " + name + " has shape " + t.shape_string() + ", expected " +
                     numkit::shape_string(rows, cols));
  }
}

void validate_layer(const MixerLayerParams& p, const ModelConfig& cfg, std::size_t window,
                    const std::string& prefix) {
  const std::size_t w = seq_norm_width(cfg, window);
  expect_shape(p.seq_W1, cfg.seq_hidden, window, prefix + "seq_W1");
  expect_shape(p.seq_W2, window, cfg.seq_hidden, prefix + "seq_W2");
  expect_shape(p.seq_gamma, 1, w, prefix + "seq_gamma");
  expect_shape(p.seq_beta, 1, w, prefix + "seq_beta");
  expect_shape(p.ch_W3, cfg.channel_hidden, cfg.dim, prefix + "ch_W3");
  expect_shape(p.ch_W4, cfg.dim, cfg.channel_hidden, prefix + "ch_W4");
  expect_shape(p.ch_gamma, 1, cfg.dim, prefix + "ch_gamma");
  expect_shape(p.ch_beta, 1, cfg.dim, prefix + "ch_beta");
}

}  // namespace

std::vector<Tensor2*> ModelParams::tensors() {
  std::vector<Tensor2*> out;
  for_each([&](const std::string&, Tensor2& t) { out.push_back(&t); });
  return out;
}

std::vector<std::string> ModelParams::names() const {
  std::vector<std::string> out;
  for_each([&](const std::string& n, const Tensor2&) { out.push_back(n); });
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Tensor2& t) { n += t.size(); });
  return n;
}

void ModelParams::zero_padding_rows() {
  if (item_embedding.rows() > 0) std::fill(item_embedding.row(0).begin(), item_embedding.row(0).end(), 0.0);
  for (Tensor2& t : feature_embeddings)
    if (t.rows() > 0) std::fill(t.row(0).begin(), t.row(0).end(), 0.0);
}

std::vector<double> ArchWeights::probabilities() const { return numkit::softmax(alpha.row(0)); }

std::size_t ArchWeights::argmax() const {
  const auto a = alpha.row(0);
  if (a.empty()) throw ConfigError("architecture weights are empty");
  return static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
}

ModelParams init_params(const ModelConfig& cfg, numkit::Rng& rng) {
  cfg.validate();
  ModelParams p;
  p.item_embedding = embedding_table(cfg.num_items + 1, cfg.dim, rng);
  for (std::size_t card : cfg.feature_cardinalities)
    p.feature_embeddings.push_back(embedding_table(card + 1, cfg.dim, rng));
  if (cfg.has_features()) {
    const std::size_t c = 1 + cfg.feature_cardinalities.size();
    p.fusion_W = uniform_fan_in(cfg.dim, c * cfg.dim, rng);
    p.fusion_b = Tensor2(1, cfg.dim);
  }
  for (std::size_t l = 0; l < cfg.layers; ++l) p.long_stack.push_back(init_layer(cfg, cfg.max_len, rng));
  for (std::size_t k : cfg.candidates) {
    std::vector<MixerLayerParams> stack;
    for (std::size_t l = 0; l < cfg.layers; ++l) stack.push_back(init_layer(cfg, k, rng));
    p.candidate_stacks.push_back(std::move(stack));
  }
  p.out_W = uniform_fan_in(cfg.dim, 2 * cfg.dim, rng);
  p.out_b = Tensor2(1, cfg.dim);
  return p;
}

ArchWeights init_arch(const ModelConfig& cfg) {
  ArchWeights a;
  a.candidates = cfg.candidates;
  a.alpha = Tensor2(1, cfg.candidates.size(), 0.0);
  return a;
}

void validate_params(const ModelParams& p, const ModelConfig& cfg) {
  expect_shape(p.item_embedding, cfg.num_items + 1, cfg.dim, "item_embedding");
  if (p.feature_embeddings.size() != cfg.feature_cardinalities.size()) {
    throw ShapeError("expected " + std::to_string(cfg.feature_cardinalities.size()) +
                     " feature tables, found " + std::to_string(p.feature_embeddings.size()));
  }
  for (std::size_t i = 0; i < p.feature_embeddings.size(); ++i) {
    expect_shape(p.feature_embeddings[i], cfg.feature_cardinalities[i] + 1, cfg.dim,
                 "feature_embedding." + std::to_string(i));
  }
  if (cfg.has_features()) {
    const std::size_t c = 1 + cfg.feature_cardinalities.size();
    expect_shape(p.fusion_W, cfg.dim, c * cfg.dim, "fusion_W");
    expect_shape(p.fusion_b, 1, cfg.dim, "fusion_b");
  } else if (!p.fusion_W.empty() || !p.fusion_b.empty()) {
    throw ShapeError("fusion parameters present without item features");
  }
  if (p.long_stack.size() != cfg.layers) throw ShapeError("long-term stack has wrong layer count");
  for (std::size_t l = 0; l < cfg.layers; ++l)
    validate_layer(p.long_stack[l], cfg, cfg.max_len, "long." + std::to_string(l) + ".");
  if (p.candidate_stacks.size() != cfg.candidates.size()) {
    throw ConfigError("model has " + std::to_string(p.candidate_stacks.size()) +
                      " candidate stacks for " + std::to_string(cfg.candidates.size()) +
                      " candidate windows");
  }
  for (std::size_t m = 0; m < cfg.candidates.size(); ++m) {
    if (p.candidate_stacks[m].size() != cfg.layers) throw ShapeError("candidate stack has wrong layer count");
    for (std::size_t l = 0; l < cfg.layers; ++l)
      validate_layer(p.candidate_stacks[m][l], cfg, cfg.candidates[m],
                     "short." + std::to_string(m) + "." + std::to_string(l) + ".");
  }
  expect_shape(p.out_W, cfg.dim, 2 * cfg.dim, "out_W");
  expect_shape(p.out_b, 1, cfg.dim, "out_b");
}

}  // namespace automlp::model
