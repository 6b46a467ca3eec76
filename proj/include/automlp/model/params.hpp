#pragma once

#include <functional>
#include <string>
#include <vector>

#include "automlp/model/config.hpp"
#include "automlp/numkit/random.hpp"
#include "automlp/numkit/tensor.hpp"

namespace automlp::model {

using numkit::Tensor2;

// One SRSMLP layer for a stack operating on `window` positions. Norm
// parameters are 1xD rows (1 x window for the sequence mixer under
// NormAxis::kSequence).
struct MixerLayerParams {
  Tensor2 seq_W1;     // R_s x window
  Tensor2 seq_W2;     // window x R_s
  Tensor2 seq_gamma;
  Tensor2 seq_beta;
  Tensor2 ch_W3;      // R_c x D
  Tensor2 ch_W4;      // D x R_c
  Tensor2 ch_gamma;
  Tensor2 ch_beta;

  template <typename F>
  void for_each(const std::string& prefix, F&& f) {
    f(prefix + "seq_W1", seq_W1);
    f(prefix + "seq_W2", seq_W2);
    f(prefix + "seq_gamma", seq_gamma);
    f(prefix + "seq_beta", seq_beta);
    f(prefix + "ch_W3", ch_W3);
    f(prefix + "ch_W4", ch_W4);
    f(prefix + "ch_gamma", ch_gamma);
    f(prefix + "ch_beta", ch_beta);
  }

  bool operator==(const MixerLayerParams&) const = default;
};

struct ModelParams {
  Tensor2 item_embedding;                  // (num_items + 1) x D, row 0 zero
  std::vector<Tensor2> feature_embeddings; // (cardinality + 1) x D each, row 0 zero
  Tensor2 fusion_W;                        // D x (C * D), C = 1 + feature columns
  Tensor2 fusion_b;                        // 1 x D
  std::vector<MixerLayerParams> long_stack;
  std::vector<std::vector<MixerLayerParams>> candidate_stacks;
  Tensor2 out_W;                           // D x 2D
  Tensor2 out_b;                           // 1 x D

  // Visits every non-empty tensor in a fixed order with a stable name.
  template <typename F>
  void for_each(F&& f) {
    f(std::string("item_embedding"), item_embedding);
    for (std::size_t i = 0; i < feature_embeddings.size(); ++i)
      f("feature_embedding." + std::to_string(i), feature_embeddings[i]);
    if (!fusion_W.empty()) {
      f(std::string("fusion_W"), fusion_W);
      f(std::string("fusion_b"), fusion_b);
    }
    for (std::size_t l = 0; l < long_stack.size(); ++l)
      long_stack[l].for_each("long." + std::to_string(l) + ".", f);
    for (std::size_t m = 0; m < candidate_stacks.size(); ++m)
      for (std::size_t l = 0; l < candidate_stacks[m].size(); ++l)
        candidate_stacks[m][l].for_each(
            "short." + std::to_string(m) + "." + std::to_string(l) + ".", f);
    f(std::string("out_W"), out_W);
    f(std::string("out_b"), out_b);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& name, Tensor2& t) { f(name, static_cast<const Tensor2&>(t)); });
  }

  std::vector<Tensor2*> tensors();
  std::vector<std::string> names() const;
  std::size_t parameter_count() const;
  // Sets row 0 of every embedding table back to zero.
  void zero_padding_rows();

  bool operator==(const ModelParams&) const = default;
};

struct ArchWeights {
  std::vector<std::size_t> candidates;
  Tensor2 alpha;  // 1 x M

  std::size_t size() const noexcept { return candidates.size(); }
  std::vector<double> probabilities() const;
  std::size_t argmax() const;
  std::size_t selected_window() const { return candidates.at(argmax()); }

  bool operator==(const ArchWeights&) const = default;
};

// Mixer and output weights uniform in +-1/sqrt(fan_in), embeddings N(0, 0.02^2)
// with a zero padding row, norm gains 1 and shifts 0, biases 0.
ModelParams init_params(const ModelConfig& cfg, numkit::Rng& rng);
ArchWeights init_arch(const ModelConfig& cfg);

// Throws ShapeError naming the first tensor whose shape disagrees with `cfg`.
void validate_params(const ModelParams& params, const ModelConfig& cfg);

}  // namespace automlp::model
