#include "automlp/train/fit.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "automlp/errors.hpp"
#include "automlp/train/batches.hpp"

namespace automlp::train {

void TrainConfig::validate() const {
  adam().validate();
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

nlohmann::json epoch_record_json(const EpochRecord& r) {
  nlohmann::json j{{"epoch", r.epoch},
                   {"train_loss", r.train_loss},
                   {"val_mrr10", r.val_mrr},
                   {"val_ndcg10", nullptr},
                   {"val_hr10", nullptr},
                   {"wall_ms", r.wall_ms}};
  if (r.val_ndcg) j["val_ndcg10"] = *r.val_ndcg;
  if (r.val_hr) j["val_hr10"] = *r.val_hr;
  return j;
}

model::ModelConfig with_fixed_window(const model::ModelConfig& cfg, std::size_t k) {
  model::ModelConfig out = cfg;
  out.candidates = {k};
  out.validate();
  return out;
}

FitResult fit(const data::SequenceDataset& ds, model::Model init, const TrainConfig& cfg,
              const FitHooks& hooks) {
  cfg.validate();
  if (ds.train.empty()) throw DataError("training split is empty");
  model::validate_params(init.params, init.config);

  const numkit::Rng root(cfg.seed);
  numkit::Rng shuffle_rng = root.split(1);
  numkit::Rng negative_rng = root.split(2);
  numkit::Rng dropout_rng = root.split(3);

  const BatchSampler sampler(ds, cfg.negatives_per_positive, cfg.negative_sampling);
  std::vector<std::uint32_t> val_candidates;
  if (!hooks.val_metric) {
    if (ds.val.empty()) throw DataError("validation split is empty");
    val_candidates = eval::candidate_lists(ds, data::Split::kVal, sampler.popularity(), cfg.validation);
  }
  // Fixed negatives are drawn once, in example order.
  std::vector<Batch> fixed;
  if (!cfg.resample_negatives) {
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      const std::size_t one[] = {i};
      fixed.push_back(sampler.make(data::Split::kTrain, one, negative_rng));
    }
  }

  model::Model current = std::move(init);
  AdamState adam;
  const AdamConfig adam_cfg = cfg.adam();
  FitResult result;
  result.best = current;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto order = shuffled_indices(ds.train.size(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> ids(order.data() + start, end - start);
      Batch batch;
      if (cfg.resample_negatives) {
        batch = sampler.make(data::Split::kTrain, ids, negative_rng);
      } else {
        batch.size = ids.size();
        batch.width = fixed.front().width;
        for (std::size_t id : ids) {
          batch.inputs.insert(batch.inputs.end(), fixed[id].inputs.begin(), fixed[id].inputs.end());
          batch.candidates.insert(batch.candidates.end(), fixed[id].candidates.begin(),
                                  fixed[id].candidates.end());
        }
      }
      model::ForwardContext ctx{true, cfg.dropout, &dropout_rng};
      LossAndGrads lg = loss_and_grads(current, batch, ds.item_features, ctx);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("training loss became non-finite at epoch " + std::to_string(epoch));
      }
      loss_sum += lg.loss * static_cast<double>(batch.size);
      adam_update(current.params, lg.weight_grads, adam, adam_cfg);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(ds.train.size());
    if (hooks.val_metric) {
      rec.val_mrr = hooks.val_metric(epoch, current);
    } else {
      const auto ranks = eval::rank_split(current, ds, data::Split::kVal, val_candidates, cfg.validation);
      const auto m = eval::metrics_at_n(ranks, cfg.validation.cutoff);
      rec.val_mrr = m.mrr;
      rec.val_ndcg = m.ndcg;
      rec.val_hr = m.hr;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);

    if (rec.val_mrr > best) {
      best = rec.val_mrr;
      result.best = current;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.best_val_mrr = best;
  return result;
}

}  // namespace automlp::train
