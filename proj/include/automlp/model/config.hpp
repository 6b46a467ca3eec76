#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "automlp/numkit/ops.hpp"
#include "json.hpp"

namespace automlp::model {

enum class NormAxis { kChannel, kSequence };

std::string_view norm_axis_name(NormAxis a);
NormAxis parse_norm_axis(std::string_view s);
std::string_view activation_name(numkit::Activation a);
numkit::Activation parse_activation(std::string_view s);

struct ModelConfig {
  std::size_t max_len = 50;         // T
  std::size_t dim = 128;            // D
  std::size_t seq_hidden = 512;     // R_s
  std::size_t channel_hidden = 512; // R_c
  std::size_t layers = 4;           // L
  // Candidate short-term windows, strictly increasing, each below max_len.
  std::vector<std::size_t> candidates{1, 2, 4, 8, 16};
  numkit::Activation activation = numkit::Activation::kGelu;
  NormAxis norm_axis = NormAxis::kChannel;
  bool disable_sequence_mixer = false;
  bool disable_channel_mixer = false;

  std::size_t num_items = 0;
  // Cardinality of each categorical item-feature column; empty for none.
  std::vector<std::size_t> feature_cardinalities;

  std::size_t num_candidates() const noexcept { return candidates.size(); }
  bool has_features() const noexcept { return !feature_cardinalities.empty(); }
  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace automlp::model
