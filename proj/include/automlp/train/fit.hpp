#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "automlp/data/sampling.hpp"
#include "automlp/data/sequences.hpp"
#include "automlp/eval/metrics.hpp"
#include "automlp/model/model.hpp"
#include "automlp/train/optim.hpp"
#include "json.hpp"

namespace automlp::train {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  double weight_decay = 0.0;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::size_t negatives_per_positive = 1;
  data::Replacement negative_sampling = data::Replacement::kWithout;
  // Draw fresh training negatives every epoch; otherwise each example keeps
  // the negatives it was first paired with.
  bool resample_negatives = true;
  double dropout = 0.5;
  std::uint64_t seed = 0;
  // Validation protocol used for early stopping (MRR at the cutoff).
  eval::EvalConfig validation{};

  AdamConfig adam() const {
    return {learning_rate, beta1, beta2, eps_adam, weight_decay};
  }
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_mrr = 0.0;
  std::optional<double> val_ndcg;
  std::optional<double> val_hr;
  double wall_ms = 0.0;
};

// {epoch, train_loss, val_mrr10, val_ndcg10, val_hr10, wall_ms}
nlohmann::json epoch_record_json(const EpochRecord& r);

struct FitHooks {
  // Replaces the validation evaluation; returns the early-stopping metric.
  std::function<double(std::size_t epoch, const model::Model&)> val_metric;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct FitResult {
  model::Model best;          // parameters of the best validation epoch
  std::size_t best_epoch = 0;
  double best_val_mrr = 0.0;
  std::vector<EpochRecord> trace;
};

// Copy of `cfg` restricted to the single short-term window `k`.
model::ModelConfig with_fixed_window(const model::ModelConfig& cfg, std::size_t k);

// Mini-batch Adam on the train split with validation-based early stopping.
// Architecture weights are left unchanged. Throws DataError when the train
// split is empty.
FitResult fit(const data::SequenceDataset& ds, model::Model init, const TrainConfig& cfg,
              const FitHooks& hooks = {});

}  // namespace automlp::train
