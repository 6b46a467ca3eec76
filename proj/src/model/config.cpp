#include "automlp/model/config.hpp"

#include "automlp/errors.hpp"

namespace automlp::model {

std::string_view norm_axis_name(NormAxis a) {
  return a == NormAxis::kChannel ? "channel" : "sequence";
}

NormAxis parse_norm_axis(std::string_view s) {
  if (s == "channel") return NormAxis::kChannel;
  if (s == "sequence") return NormAxis::kSequence;
  throw ConfigError("norm_axis must be 'channel' or 'sequence', got '" + std::string(s) + "'");
}

std::string_view activation_name(numkit::Activation a) {
  return a == numkit::Activation::kGelu ? "gelu" : "relu";
}

numkit::Activation parse_activation(std::string_view s) {
  if (s == "gelu") return numkit::Activation::kGelu;
  if (s == "relu") return numkit::Activation::kRelu;
  throw ConfigError("activation must be 'gelu' or 'relu', got '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (max_len < 2) throw ConfigError("max_len must be at least 2");
  if (dim == 0 || seq_hidden == 0 || channel_hidden == 0) {
    throw ConfigError("dim and hidden sizes must be positive");
  }
  if (layers == 0) throw ConfigError("layers must be at least 1");
  if (candidates.empty()) throw ConfigError("candidate window list is empty");
  for (std::size_t m = 0; m < candidates.size(); ++m) {
    if (candidates[m] == 0 || candidates[m] >= max_len) {
      throw ConfigError("candidate window " + std::to_string(candidates[m]) +
                        " must lie in [1, max_len) with max_len " + std::to_string(max_len));
    }
    if (m > 0 && candidates[m] <= candidates[m - 1]) {
      throw ConfigError("candidate windows must be strictly increasing");
    }
  }
  if (num_items == 0) throw ConfigError("num_items must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"max_len", c.max_len},
                     {"dim", c.dim},
                     {"seq_hidden", c.seq_hidden},
                     {"channel_hidden", c.channel_hidden},
                     {"layers", c.layers},
                     {"candidates", c.candidates},
                     {"activation", activation_name(c.activation)},
                     {"norm_axis", norm_axis_name(c.norm_axis)},
                     {"disable_sequence_mixer", c.disable_sequence_mixer},
                     {"disable_channel_mixer", c.disable_channel_mixer},
                     {"num_items", c.num_items},
                     {"feature_cardinalities", c.feature_cardinalities}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("max_len").get_to(c.max_len);
  j.at("dim").get_to(c.dim);
  j.at("seq_hidden").get_to(c.seq_hidden);
  j.at("channel_hidden").get_to(c.channel_hidden);
  j.at("layers").get_to(c.layers);
  j.at("candidates").get_to(c.candidates);
  c.activation = parse_activation(j.at("activation").get<std::string>());
  c.norm_axis = parse_norm_axis(j.at("norm_axis").get<std::string>());
  j.at("disable_sequence_mixer").get_to(c.disable_sequence_mixer);
  j.at("disable_channel_mixer").get_to(c.disable_channel_mixer);
  j.at("num_items").get_to(c.num_items);
  j.at("feature_cardinalities").get_to(c.feature_cardinalities);
}

}  // namespace automlp::model
