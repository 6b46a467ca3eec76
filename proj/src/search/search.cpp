#include "automlp/search/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "automlp/errors.hpp"

namespace automlp::search {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void notify(const SearchHooks& hooks, Update u, data::Split s) {
  if (hooks.on_update) hooks.on_update(u, s);
}

double squared_norm(std::span<const Tensor2> ts) {
  double s = 0.0;
  for (const auto& t : ts)
    for (double v : t.values()) s += v * v;
  return s;
}

// Copy of `params` with every tensor shifted by scale * dirs.
model::ModelParams shifted(const model::ModelParams& params, std::span<const Tensor2> dirs,
                           double scale) {
  model::ModelParams out = params;
  const auto ts = out.tensors();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    auto dst = ts[i]->values();
    const auto src = dirs[i].values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
  }
  return out;
}

}  // namespace

std::string mode_name(Mode m) {
  return m == Mode::kFirstOrder ? "first_order" : "one_step_unrolled";
}

Mode parse_mode(const std::string& s) {
  if (s == "first_order") return Mode::kFirstOrder;
  if (s == "one_step_unrolled") return Mode::kOneStepUnrolled;
  throw ConfigError("unknown search mode '" + s + "' (expected first_order or one_step_unrolled)");
}

void SearchConfig::validate(std::size_t max_len) const {
  if (candidates.empty()) throw ConfigError("candidate window list is empty");
  for (std::size_t m = 0; m < candidates.size(); ++m) {
    if (candidates[m] == 0 || candidates[m] >= max_len) {
      throw ConfigError("candidate window " + std::to_string(candidates[m]) +
                        " must lie in [1, " + std::to_string(max_len) + ")");
    }
    if (m > 0 && candidates[m] <= candidates[m - 1]) {
      throw ConfigError("candidate windows must be strictly increasing");
    }
  }
  if (!(arch_lr >= 0.0)) throw ConfigError("arch_lr must be non-negative");
  train.validate();
}

std::vector<Tensor2> approx_inner(std::span<const Tensor2> weights, std::span<const Tensor2> grads,
                                  std::span<const std::string> names, double xi) {
  if (weights.size() != grads.size() || names.size() != weights.size()) {
    throw ShapeError("approx_inner: weights, gradients and names differ in count");
  }
  std::vector<Tensor2> out;
  out.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    numkit::require_same_shape(weights[i], grads[i], "approx_inner");
    Tensor2 w = weights[i];
    const auto g = grads[i].values();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!std::isfinite(g[j])) {
        throw NumericalError("non-finite gradient in parameter " + names[i] + " at index " +
                             std::to_string(j));
      }
      w[j] -= xi * g[j];
    }
    out.push_back(std::move(w));
  }
  return out;
}

model::ModelParams approx_inner(const model::Model& m, const train::Batch& batch,
                                model::ItemFeatures features, model::ForwardContext& ctx,
                                double xi) {
  const auto lg = train::loss_and_grads(m, batch, features, ctx);
  model::ModelParams out = m.params;
  const auto ts = out.tensors();
  std::vector<Tensor2> current;
  current.reserve(ts.size());
  for (const Tensor2* t : ts) current.push_back(*t);
  const auto names = m.params.names();
  auto next = approx_inner(current, lg.weight_grads, names, xi);
  for (std::size_t i = 0; i < ts.size(); ++i) *ts[i] = std::move(next[i]);
  return out;
}

SplitStream::SplitStream(const train::BatchSampler& sampler, data::Split split,
                         std::size_t batch_size, numkit::Rng rng)
    : sampler_(sampler), split_(split), batch_size_(batch_size), rng_(rng) {
  if (batch_size_ == 0) throw ConfigError("batch_size must be positive");
  if (sampler_.dataset().examples(split_).empty()) {
    throw DataError(std::string(data::split_name(split_)) + " split is empty");
  }
}

std::size_t SplitStream::batches_per_epoch() const {
  const std::size_t n = sampler_.dataset().examples(split_).size();
  return (n + batch_size_ - 1) / batch_size_;
}

train::Batch SplitStream::next() {
  const std::size_t n = sampler_.dataset().examples(split_).size();
  if (pos_ >= order_.size()) {
    order_ = train::shuffled_indices(n, rng_);
    pos_ = 0;
  }
  const std::size_t count = std::min(batch_size_, order_.size() - pos_);
  const std::span<const std::size_t> ids(order_.data() + pos_, count);
  pos_ += count;
  return sampler_.make(split_, ids, rng_);
}

Tensor2 arch_gradient(const model::Model& m, const train::Batch& train_batch,
                      const train::Batch& val_batch, model::ItemFeatures features,
                      const SearchConfig& cfg, model::ForwardContext& train_ctx,
                      double* val_loss) {
  const double xi = cfg.train.learning_rate;
  model::ForwardContext plain;
  const model::Model virt{m.config, approx_inner(m, train_batch, features, train_ctx, xi), m.arch};
  const auto val = train::loss_and_grads(virt, val_batch, features, plain);
  if (!std::isfinite(val.loss)) throw NumericalError("validation loss became non-finite");
  if (val_loss != nullptr) *val_loss = val.loss;
  Tensor2 grad = val.alpha_grad;
  if (cfg.mode == Mode::kFirstOrder) return grad;
  // Second-order term -xi * d2L_train/dA dW . grad_W' L_val by central
  // differences along the validation gradient.
  const double norm = std::sqrt(squared_norm(val.weight_grads));
  if (norm == 0.0) return grad;
  const double eps = 0.01 / norm;
  const model::Model plus{m.config, shifted(m.params, val.weight_grads, eps), m.arch};
  const model::Model minus{m.config, shifted(m.params, val.weight_grads, -eps), m.arch};
  const auto gp = train::loss_and_grads(plus, train_batch, features, plain).alpha_grad;
  const auto gm = train::loss_and_grads(minus, train_batch, features, plain).alpha_grad;
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] -= xi * (gp[j] - gm[j]) / (2.0 * eps);
  return grad;
}

SearchEpochStats search_epoch(SearchState& state, BatchStream& train_stream,
                              BatchStream& val_stream, model::ItemFeatures features,
                              const SearchConfig& cfg, const SearchHooks& hooks) {
  if (train_stream.split() == val_stream.split()) {
    throw ArgumentError("search needs distinct train and validation streams");
  }
  const train::AdamConfig weight_cfg = cfg.train.adam();
  train::AdamConfig arch_cfg;
  arch_cfg.learning_rate = cfg.arch_lr;

  const std::size_t iters = train_stream.batches_per_epoch();
  if (iters == 0) throw DataError("train stream is empty");
  SearchEpochStats stats;
  model::Model& m = state.model;
  for (std::size_t it = 0; it < iters; ++it) {
    const train::Batch val_batch = val_stream.next();
    const train::Batch train_batch = train_stream.next();

    model::ForwardContext train_ctx{true, cfg.train.dropout, &state.dropout_rng};
    double val_loss = 0.0;
    const Tensor2 alpha_grad =
        arch_gradient(m, train_batch, val_batch, features, cfg, train_ctx, &val_loss);
    Tensor2* arch_params[] = {&m.arch.alpha};
    const Tensor2 arch_grads[] = {alpha_grad};
    train::adam_update(arch_params, arch_grads, state.arch_opt, arch_cfg);
    notify(hooks, Update::kArch, val_stream.split());
    stats.val_loss += val_loss;

    // Weight step on the training loss under the updated alpha.
    const auto tr = train::loss_and_grads(m, train_batch, features, train_ctx);
    if (!std::isfinite(tr.loss)) throw NumericalError("training loss became non-finite");
    train::adam_update(m.params, tr.weight_grads, state.weight_opt, weight_cfg);
    notify(hooks, Update::kWeights, train_stream.split());
    stats.train_loss += tr.loss;
  }
  stats.val_loss /= static_cast<double>(iters);
  stats.train_loss /= static_cast<double>(iters);
  return stats;
}

nlohmann::json search_record_json(const SearchEpochRecord& r) {
  return {{"epoch", r.epoch}, {"alpha", r.alpha}, {"p", r.p}, {"val_loss", r.val_loss},
          {"wall_ms", r.wall_ms}};
}

nlohmann::json result_json(const SearchResult& r) {
  return {{"candidates", r.candidates},
          {"alpha", r.alpha},
          {"p", numkit::softmax(r.alpha)},
          {"selected_k", r.selected_k},
          {"epochs", r.epochs},
          {"wall_ms", r.wall_ms}};
}

SearchResult result_from_json(const nlohmann::json& j) {
  SearchResult r;
  try {
    j.at("candidates").get_to(r.candidates);
    j.at("alpha").get_to(r.alpha);
    j.at("selected_k").get_to(r.selected_k);
    if (j.contains("epochs")) j.at("epochs").get_to(r.epochs);
    if (j.contains("wall_ms")) j.at("wall_ms").get_to(r.wall_ms);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed search result: ") + e.what());
  }
  if (r.candidates.empty() || r.alpha.size() != r.candidates.size()) {
    throw DataError("search result: alpha and candidate list differ in length");
  }
  return r;
}

SearchResult run_search(const data::SequenceDataset& ds, const model::ModelConfig& model_cfg,
                        const SearchConfig& cfg,
                        const std::function<void(const SearchEpochRecord&)>& on_epoch) {
  cfg.validate(model_cfg.max_len);
  if (ds.train.empty()) throw DataError("training split is empty");
  if (ds.val.empty()) throw DataError("validation split is empty");
  const auto t0 = Clock::now();

  model::ModelConfig mc = model_cfg;
  mc.candidates = cfg.candidates;
  const numkit::Rng root(cfg.train.seed);
  numkit::Rng init_rng = root.split(10);
  SearchState state{model::Model::create(mc, init_rng), {}, {}, root.split(13)};

  const train::BatchSampler sampler(ds, cfg.train.negatives_per_positive,
                                    cfg.train.negative_sampling);
  SplitStream train_stream(sampler, data::Split::kTrain, cfg.train.batch_size, root.split(11));
  SplitStream val_stream(sampler, data::Split::kVal, cfg.train.batch_size, root.split(12));

  SearchResult result;
  result.candidates = cfg.candidates;
  std::size_t last_argmax = state.model.arch.argmax();
  std::size_t stable = 0;
  for (std::size_t epoch = 1; epoch <= cfg.train.max_epochs; ++epoch) {
    const auto e0 = Clock::now();
    const auto stats = search_epoch(state, train_stream, val_stream, ds.item_features, cfg);
    SearchEpochRecord rec;
    rec.epoch = epoch;
    const auto a = state.model.arch.alpha.row(0);
    rec.alpha.assign(a.begin(), a.end());
    rec.p = state.model.arch.probabilities();
    rec.val_loss = stats.val_loss;
    rec.wall_ms = ms_since(e0);
    result.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);
    result.epochs = epoch;

    const std::size_t am = state.model.arch.argmax();
    stable = am == last_argmax ? stable + 1 : 0;
    last_argmax = am;
    if (stable >= cfg.train.patience) break;
  }
  const auto a = state.model.arch.alpha.row(0);
  result.alpha.assign(a.begin(), a.end());
  result.selected_k = state.model.arch.selected_window();
  result.searched = std::move(state.model);
  result.wall_ms = ms_since(t0);
  return result;
}

model::Model retrain_init(const SearchResult& result, const model::ModelConfig& model_cfg,
                          std::size_t k, const SearchConfig& cfg) {
  const model::ModelConfig mc = train::with_fixed_window(model_cfg, k);
  if (!cfg.warm_start) {
    numkit::Rng rng = numkit::Rng(cfg.train.seed).split(20);
    return model::Model::create(mc, rng);
  }
  const auto& cands = result.searched.arch.candidates;
  const auto it = std::find(cands.begin(), cands.end(), k);
  if (it == cands.end()) {
    throw ConfigError("warm start needs a searched model containing window " + std::to_string(k));
  }
  model::Model m{mc, result.searched.params, model::init_arch(mc)};
  m.params.candidate_stacks = {result.searched.params.candidate_stacks[static_cast<std::size_t>(
      it - cands.begin())]};
  model::validate_params(m.params, mc);
  return m;
}

nlohmann::json oracle_json(const OracleResult& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& e : r.per_k) {
    per.push_back({{"k", e.k}, {"val_mrr10", e.val_mrr}, {"best_epoch", e.best_epoch},
                   {"epochs", e.epochs}, {"wall_ms", e.wall_ms}});
  }
  return {{"best_k", r.best_k}, {"per_k", per}, {"wall_ms", r.wall_ms}};
}

OracleResult exhaustive_oracle(const data::SequenceDataset& ds, const model::ModelConfig& model_cfg,
                               std::span<const std::size_t> candidates,
                               const train::TrainConfig& cfg) {
  if (candidates.empty()) throw ConfigError("candidate window list is empty");
  if (!std::is_sorted(candidates.begin(), candidates.end(), std::less_equal<>())) {
    throw ConfigError("candidate windows must be strictly increasing");
  }
  const auto t0 = Clock::now();
  OracleResult out;
  double best = -1.0;
  for (std::size_t k : candidates) {
    const auto k0 = Clock::now();
    const model::ModelConfig mc = train::with_fixed_window(model_cfg, k);
    numkit::Rng rng = numkit::Rng(cfg.seed).split(20);
    const auto fitted = train::fit(ds, model::Model::create(mc, rng), cfg);
    OracleEntry e{k, fitted.best_val_mrr, fitted.best_epoch, fitted.trace.size(), ms_since(k0)};
    out.per_k.push_back(e);
    if (e.val_mrr > best) {
      best = e.val_mrr;
      out.best_k = k;
    }
  }
  out.wall_ms = ms_since(t0);
  return out;
}

}  // namespace automlp::search
