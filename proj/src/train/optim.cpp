#include "automlp/train/optim.hpp"

#include <cmath>

#include "automlp/errors.hpp"
#include "automlp/numkit/ops.hpp"

namespace automlp::train {

double bce_loss(double pos_score, std::span<const double> neg_scores) {
  double loss = -numkit::log_sigmoid(pos_score);
  for (double s : neg_scores) loss -= numkit::log_sigmoid(-s);
  return loss;
}

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("Adam eps must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
}

void adam_update(std::span<Tensor2* const> params, std::span<const Tensor2> grads,
                 AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_update: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty()) {
    for (const Tensor2* p : params) {
      state.m.emplace_back(p->rows(), p->cols());
      state.v.emplace_back(p->rows(), p->cols());
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_update: optimizer state size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    numkit::require_same_shape(*params[i], grads[i], "adam_update");
    numkit::require_same_shape(*params[i], state.m[i], "adam_update");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor2& p = *params[i];
    Tensor2& m = state.m[i];
    Tensor2& v = state.v[i];
    const Tensor2& g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j] + cfg.weight_decay * p[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      p[j] -= cfg.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
    }
  }
}

void adam_update(model::ModelParams& params, std::span<const Tensor2> grads, AdamState& state,
                 const AdamConfig& cfg) {
  const auto tensors = params.tensors();
  adam_update(tensors, grads, state, cfg);
  params.zero_padding_rows();
}

}  // namespace automlp::train
