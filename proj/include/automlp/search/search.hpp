#pragma once

// Bilevel search over the short-term window length. Network weights W are
// fitted on the train split while the architecture logits alpha are fitted
// on the validation split against a one-step look-ahead of W.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "automlp/data/sequences.hpp"
#include "automlp/model/model.hpp"
#include "automlp/train/batches.hpp"
#include "automlp/train/fit.hpp"
#include "json.hpp"

namespace automlp::search {

using numkit::Tensor2;

enum class Mode { kFirstOrder, kOneStepUnrolled };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct SearchConfig {
  std::vector<std::size_t> candidates{1, 2, 4, 8, 16};
  double arch_lr = 3e-3;
  Mode mode = Mode::kFirstOrder;
  // Weight optimizer, virtual-step size (its learning_rate), batch size,
  // negatives, dropout and seed. max_epochs bounds the search and patience
  // counts epochs of an unchanged argmax(alpha).
  train::TrainConfig train{};
  // Retraining copies the searched weights instead of starting fresh.
  bool warm_start = false;

  void validate(std::size_t max_len) const;
};

// W' = W - xi * grad for every tensor. Throws NumericalError naming the first
// tensor whose gradient holds a non-finite value.
std::vector<Tensor2> approx_inner(std::span<const Tensor2> weights, std::span<const Tensor2> grads,
                                  std::span<const std::string> names, double xi);
// Same for a model: the gradient is the training loss on `batch`.
model::ModelParams approx_inner(const model::Model& m, const train::Batch& batch,
                                model::ItemFeatures features, model::ForwardContext& ctx,
                                double xi);

// Endless source of mini-batches from one split.
class BatchStream {
 public:
  virtual ~BatchStream() = default;
  virtual data::Split split() const = 0;
  virtual std::size_t batches_per_epoch() const = 0;
  virtual train::Batch next() = 0;
};

// Reshuffled passes over a split of the sampler's dataset.
class SplitStream : public BatchStream {
 public:
  SplitStream(const train::BatchSampler& sampler, data::Split split, std::size_t batch_size,
              numkit::Rng rng);
  data::Split split() const override { return split_; }
  std::size_t batches_per_epoch() const override;
  train::Batch next() override;

 private:
  const train::BatchSampler& sampler_;
  data::Split split_;
  std::size_t batch_size_;
  numkit::Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

enum class Update { kWeights, kArch };

struct SearchHooks {
  // Called once per optimizer step with the split whose batch produced the
  // gradient.
  std::function<void(Update, data::Split)> on_update;
};

struct SearchState {
  model::Model model;
  train::AdamState weight_opt;
  train::AdamState arch_opt;
  numkit::Rng dropout_rng;
};

struct SearchEpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;  // mean validation loss at the virtual weights
};

// Gradient of the validation loss at W' = W - xi grad L_train(W, A) with
// respect to A. first_order holds W' fixed; one_step_unrolled adds the
// finite-difference second-order term. The look-ahead uses `train_ctx`
// (dropout included); the validation pass never drops units.
Tensor2 arch_gradient(const model::Model& m, const train::Batch& train_batch,
                      const train::Batch& val_batch, model::ItemFeatures features,
                      const SearchConfig& cfg, model::ForwardContext& train_ctx,
                      double* val_loss = nullptr);

// One pass over the train stream. Each iteration takes a validation batch,
// steps alpha on the validation loss at W' = W - xi grad L_train, then steps
// W on the training loss under the new alpha.
SearchEpochStats search_epoch(SearchState& state, BatchStream& train_stream,
                              BatchStream& val_stream, model::ItemFeatures features,
                              const SearchConfig& cfg, const SearchHooks& hooks = {});

struct SearchEpochRecord {
  std::size_t epoch = 0;
  std::vector<double> alpha;
  std::vector<double> p;
  double val_loss = 0.0;
  double wall_ms = 0.0;
};
nlohmann::json search_record_json(const SearchEpochRecord& r);

struct SearchResult {
  std::vector<std::size_t> candidates;
  std::vector<double> alpha;
  std::size_t selected_k = 0;
  std::size_t epochs = 0;
  std::vector<SearchEpochRecord> trace;
  double wall_ms = 0.0;
  model::Model searched;  // final search-phase model
};

// {candidates, alpha, p, selected_k, epochs, wall_ms}
nlohmann::json result_json(const SearchResult& r);
// Reads the fields written by result_json; the searched model is not stored.
SearchResult result_from_json(const nlohmann::json& j);

// Fresh W, alpha = 0, then search epochs until argmax(alpha) has been stable
// for `patience` epochs or max_epochs is reached.
SearchResult run_search(const data::SequenceDataset& ds, const model::ModelConfig& model_cfg,
                        const SearchConfig& cfg,
                        const std::function<void(const SearchEpochRecord&)>& on_epoch = {});

// Starting point for retraining with window k: fresh weights, or the search
// weights restricted to k when cfg.warm_start is set.
model::Model retrain_init(const SearchResult& result, const model::ModelConfig& model_cfg,
                          std::size_t k, const SearchConfig& cfg);

struct OracleEntry {
  std::size_t k = 0;
  double val_mrr = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs = 0;
  double wall_ms = 0.0;
};

struct OracleResult {
  std::size_t best_k = 0;
  std::vector<OracleEntry> per_k;
  double wall_ms = 0.0;
};
nlohmann::json oracle_json(const OracleResult& r);

// Trains one single-window model per candidate and keeps the best validation
// MRR; ties go to the smaller window.
OracleResult exhaustive_oracle(const data::SequenceDataset& ds, const model::ModelConfig& model_cfg,
                               std::span<const std::size_t> candidates,
                               const train::TrainConfig& cfg);

}  // namespace automlp::search
