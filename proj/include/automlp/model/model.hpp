#pragma once

#include "automlp/model/config.hpp"
#include "automlp/model/params.hpp"

namespace automlp::model {

struct Model {
  ModelConfig config;
  ModelParams params;
  ArchWeights arch;

  // Fresh parameters and uniform architecture weights.
  static Model create(const ModelConfig& cfg, numkit::Rng& rng) {
    return Model{cfg, init_params(cfg, rng), init_arch(cfg)};
  }
  bool operator==(const Model&) const = default;
};

}  // namespace automlp::model
