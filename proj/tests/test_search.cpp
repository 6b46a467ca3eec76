#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "automlp/data/synthetic.hpp"
#include "automlp/errors.hpp"
#include "automlp/numkit/autodiff.hpp"
#include "automlp/search/search.hpp"
#include "doctest.h"

using namespace automlp;
using numkit::Rng;
using numkit::Tensor2;

namespace {

data::SequenceDataset planted(std::size_t users, std::uint64_t seed = 1) {
  data::SynthConfig sc;
  sc.num_users = users;
  sc.seq_len = 14;
  sc.vocab = 20;
  Rng rng(seed);
  return data::build_sequences(data::synthesize_log(sc, rng), 6);
}

model::ModelConfig small_model(const data::SequenceDataset& ds) {
  model::ModelConfig c;
  c.max_len = ds.max_len;
  c.dim = 8;
  c.seq_hidden = 8;
  c.channel_hidden = 8;
  c.layers = 1;
  c.candidates = {1, 2, 4};
  c.num_items = ds.num_items;
  return c;
}

search::SearchConfig quick_search() {
  search::SearchConfig s;
  s.candidates = {1, 2, 4};
  s.arch_lr = 3e-2;
  s.train.learning_rate = 1e-2;
  s.train.batch_size = 16;
  s.train.max_epochs = 2;
  s.train.patience = 10;
  s.train.dropout = 0.0;
  s.train.negatives_per_positive = 2;
  s.train.negative_sampling = data::Replacement::kWith;
  s.train.validation.num_negatives = 10;
  s.train.validation.sampling = data::Replacement::kWith;
  s.train.seed = 4;
  return s;
}

// Records every batch it hands out.
class CountingStream : public search::BatchStream {
 public:
  explicit CountingStream(search::BatchStream& inner) : inner_(inner) {}
  data::Split split() const override { return inner_.split(); }
  std::size_t batches_per_epoch() const override { return inner_.batches_per_epoch(); }
  train::Batch next() override {
    ++served;
    return inner_.next();
  }
  std::size_t served = 0;

 private:
  search::BatchStream& inner_;
};

struct Fixture {
  data::SequenceDataset ds = planted(40);
  search::SearchConfig cfg = quick_search();
  model::ModelConfig mc = small_model(ds);
  train::BatchSampler sampler{ds, 2, data::Replacement::kWith};

  search::SearchState state(std::uint64_t seed = 3) {
    Rng rng(seed);
    return {model::Model::create(mc, rng), {}, {}, Rng(99)};
  }
  search::SplitStream stream(data::Split s, std::uint64_t seed) {
    return {sampler, s, cfg.train.batch_size, Rng(seed)};
  }
};

}  // namespace

TEST_CASE("approx_inner on a scalar square") {
  Tensor2 w(1, 1, 1.0);
  numkit::Tape t;
  const auto v = t.leaf(w);
  t.backward(numkit::ad::sum(t, numkit::ad::mul(t, v, v)));
  const Tensor2 weights[] = {w};
  const Tensor2 grads[] = {t.grad(v)};
  const std::string names[] = {"w"};
  const auto out = search::approx_inner(weights, grads, names, 0.1);
  CHECK(out[0](0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(search::approx_inner(weights, grads, names, 0.1)[0] == out[0]);
  CHECK(search::approx_inner(weights, grads, names, 0.0)[0] == w);
}

TEST_CASE("approx_inner names the parameter with a non-finite gradient") {
  const Tensor2 weights[] = {Tensor2(1, 2), Tensor2(2, 2)};
  Tensor2 bad(2, 2);
  bad(1, 0) = std::nan("");
  const Tensor2 grads[] = {Tensor2(1, 2), bad};
  const std::string names[] = {"first", "long.0.ch_W3"};
  try {
    search::approx_inner(weights, grads, names, 0.1);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("long.0.ch_W3") != std::string::npos);
  }
}

TEST_CASE("model approx_inner with zero step returns the weights") {
  Fixture f;
  auto st = f.state();
  auto s = f.stream(data::Split::kTrain, 1);
  const auto batch = s.next();
  model::ForwardContext ctx;
  CHECK(search::approx_inner(st.model, batch, f.ds.item_features, ctx, 0.0) == st.model.params);
  const auto a = search::approx_inner(st.model, batch, f.ds.item_features, ctx, 0.05);
  const auto b = search::approx_inner(st.model, batch, f.ds.item_features, ctx, 0.05);
  CHECK(a == b);
  CHECK_FALSE(a == st.model.params);
  for (double v : a.item_embedding.row(0)) CHECK(v == 0.0);
}

TEST_CASE("unrolled architecture gradient matches finite differences") {
  Fixture f;
  f.cfg.mode = search::Mode::kOneStepUnrolled;
  f.cfg.train.learning_rate = 0.5;
  auto st = f.state();
  st.model.arch.alpha(0, 0) = 0.3;
  st.model.arch.alpha(0, 2) = -0.2;
  auto ts = f.stream(data::Split::kTrain, 1);
  auto vs = f.stream(data::Split::kVal, 2);
  const auto tb = ts.next();
  const auto vb = vs.next();
  const auto& feats = f.ds.item_features;
  const double xi = f.cfg.train.learning_rate;

  auto objective = [&](const model::Model& m) {
    model::ForwardContext plain;
    const model::Model virt{m.config, search::approx_inner(m, tb, feats, plain, xi), m.arch};
    return train::batch_loss(virt, vb, feats, plain);
  };
  model::ForwardContext ctx;
  const Tensor2 unrolled = search::arch_gradient(st.model, tb, vb, feats, f.cfg, ctx);
  f.cfg.mode = search::Mode::kFirstOrder;
  const Tensor2 first = search::arch_gradient(st.model, tb, vb, feats, f.cfg, ctx);

  // The Hessian-vector product is itself a central difference with a step of
  // norm 0.01 in W, so agreement is limited to that order.
  double err_unrolled = 0.0, err_first = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    model::Model up = st.model, down = st.model;
    const double h = 1e-5;
    up.arch.alpha(0, j) += h;
    down.arch.alpha(0, j) -= h;
    const double numeric = (objective(up) - objective(down)) / (2.0 * h);
    err_unrolled += (unrolled(0, j) - numeric) * (unrolled(0, j) - numeric);
    err_first += (first(0, j) - numeric) * (first(0, j) - numeric);
    norm += numeric * numeric;
  }
  CHECK(std::sqrt(err_unrolled / norm) < 0.05);
  CHECK(std::sqrt(err_first / norm) > 1.0);
}

TEST_CASE("a single candidate has an exactly zero architecture gradient") {
  Fixture f;
  f.mc.candidates = {2};
  f.cfg.candidates = {2};
  auto st = f.state();
  auto ts = f.stream(data::Split::kTrain, 1);
  auto vs = f.stream(data::Split::kVal, 2);
  model::ForwardContext ctx;
  const auto g = search::arch_gradient(st.model, ts.next(), vs.next(), f.ds.item_features, f.cfg, ctx);
  CHECK(g(0, 0) == 0.0);
}

TEST_CASE("updates draw alpha from validation and weights from training batches") {
  Fixture f;
  auto st = f.state();
  auto ts = f.stream(data::Split::kTrain, 1);
  auto vs = f.stream(data::Split::kVal, 2);
  CountingStream tc(ts), vc(vs);
  std::size_t arch = 0, weights = 0;
  search::SearchHooks hooks;
  hooks.on_update = [&](search::Update u, data::Split s) {
    if (u == search::Update::kArch) {
      CHECK(s == data::Split::kVal);
      ++arch;
    } else {
      CHECK(s == data::Split::kTrain);
      ++weights;
    }
  };
  search::search_epoch(st, tc, vc, f.ds.item_features, f.cfg, hooks);
  CHECK(tc.served == ts.batches_per_epoch());
  CHECK(vc.served == tc.served);
  CHECK(arch == tc.served);
  CHECK(weights == tc.served);
}

TEST_CASE("weights never see validation batches") {
  // With alpha frozen, the weight trajectory must not depend on which
  // validation batches were drawn.
  Fixture f;
  f.cfg.arch_lr = 0.0;
  auto a = f.state();
  auto b = f.state();
  auto ta = f.stream(data::Split::kTrain, 1), tb = f.stream(data::Split::kTrain, 1);
  auto va = f.stream(data::Split::kVal, 2), vb = f.stream(data::Split::kVal, 777);
  search::search_epoch(a, ta, va, f.ds.item_features, f.cfg);
  search::search_epoch(b, tb, vb, f.ds.item_features, f.cfg);
  CHECK(a.model.params == b.model.params);
  CHECK(a.model.arch.alpha == Tensor2(1, 3));
}

TEST_CASE("alpha never sees training gradients") {
  // With a zero weight step W stays put, so alpha may depend on validation
  // batches only.
  Fixture f;
  f.cfg.train.learning_rate = 0.0;
  auto a = f.state();
  auto b = f.state();
  auto ta = f.stream(data::Split::kTrain, 1), tb = f.stream(data::Split::kTrain, 555);
  auto va = f.stream(data::Split::kVal, 2), vb = f.stream(data::Split::kVal, 2);
  search::search_epoch(a, ta, va, f.ds.item_features, f.cfg);
  search::search_epoch(b, tb, vb, f.ds.item_features, f.cfg);
  CHECK(a.model.arch == b.model.arch);
  CHECK_FALSE(a.model.arch.alpha == Tensor2(1, 3));
}

TEST_CASE("search_epoch rejects two streams over the same split") {
  Fixture f;
  auto st = f.state();
  auto a = f.stream(data::Split::kTrain, 1), b = f.stream(data::Split::kTrain, 2);
  CHECK_THROWS_AS(search::search_epoch(st, a, b, f.ds.item_features, f.cfg), ArgumentError);
}

TEST_CASE("run_search keeps a normalized relaxation and a consistent selection") {
  Fixture f;
  f.cfg.train.max_epochs = 3;
  const auto r = search::run_search(f.ds, f.mc, f.cfg);
  REQUIRE(r.trace.size() == 3);
  for (const auto& rec : r.trace) {
    CHECK(std::abs(std::accumulate(rec.p.begin(), rec.p.end(), 0.0) - 1.0) <= 1e-12);
    CHECK(std::isfinite(rec.val_loss));
  }
  const auto best = std::max_element(r.alpha.begin(), r.alpha.end()) - r.alpha.begin();
  CHECK(r.selected_k == r.candidates.at(static_cast<std::size_t>(best)));
  CHECK(r.searched.arch.alpha.row(0)[0] == r.alpha[0]);
}

TEST_CASE("run_search is deterministic") {
  Fixture f;
  f.cfg.train.dropout = 0.2;
  const auto a = search::run_search(f.ds, f.mc, f.cfg);
  const auto b = search::run_search(f.ds, f.mc, f.cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].alpha == b.trace[i].alpha);
    CHECK(a.trace[i].val_loss == b.trace[i].val_loss);
  }
  CHECK(a.searched == b.searched);
}

TEST_CASE("a singleton candidate set keeps alpha at zero") {
  Fixture f;
  f.cfg.candidates = {2};
  const auto r = search::run_search(f.ds, f.mc, f.cfg);
  CHECK(r.selected_k == 2);
  CHECK(r.alpha == std::vector<double>{0.0});
}

TEST_CASE("frozen alpha still trains the equal-weight mixture") {
  Fixture f;
  f.cfg.arch_lr = 0.0;
  f.cfg.train.max_epochs = 1;
  auto st = f.state();
  auto ts = f.stream(data::Split::kTrain, 1);
  auto vs = f.stream(data::Split::kVal, 2);
  std::vector<double> losses;
  for (int e = 0; e < 8; ++e) {
    losses.push_back(search::search_epoch(st, ts, vs, f.ds.item_features, f.cfg).train_loss);
  }
  CHECK(st.model.arch.alpha == Tensor2(1, 3));
  CHECK(losses.back() < losses.front());
}

TEST_CASE("argmax stability stops the search early") {
  Fixture f;
  f.cfg.train.max_epochs = 50;
  f.cfg.train.patience = 2;
  const auto r = search::run_search(f.ds, f.mc, f.cfg);
  CHECK(r.epochs < 50);
  CHECK(r.epochs >= 2);
  const auto n = r.trace.size();
  auto arg = [&](std::size_t i) {
    const auto& a = r.trace[i].alpha;
    return std::max_element(a.begin(), a.end()) - a.begin();
  };
  CHECK(arg(n - 1) == arg(n - 2));
  CHECK(arg(n - 2) == arg(n - 3));
}

TEST_CASE("search result json round trip") {
  search::SearchResult r;
  r.candidates = {1, 2, 4};
  r.alpha = {0.1, 0.7, -0.2};
  r.selected_k = 2;
  r.epochs = 9;
  const auto j = search::result_json(r);
  CHECK(j["p"].size() == 3);
  const auto back = search::result_from_json(j);
  CHECK(back.candidates == r.candidates);
  CHECK(back.alpha == r.alpha);
  CHECK(back.selected_k == 2);
  CHECK_THROWS_AS(search::result_from_json(nlohmann::json{{"alpha", {1.0}}}), DataError);
  auto mismatched = j;
  mismatched["alpha"] = {1.0};
  CHECK_THROWS_AS(search::result_from_json(mismatched), DataError);
}

TEST_CASE("search config validation") {
  search::SearchConfig c = quick_search();
  CHECK_NOTHROW(c.validate(6));
  c.candidates = {2, 2};
  CHECK_THROWS_AS(c.validate(6), ConfigError);
  c.candidates = {1, 6};
  CHECK_THROWS_AS(c.validate(6), ConfigError);
  c.candidates = {};
  CHECK_THROWS_AS(c.validate(6), ConfigError);
  CHECK(search::parse_mode("one_step_unrolled") == search::Mode::kOneStepUnrolled);
  CHECK(search::mode_name(search::Mode::kFirstOrder) == "first_order");
  CHECK_THROWS_AS(search::parse_mode("second"), ConfigError);
}

TEST_CASE("retraining starts fresh unless warm start is requested") {
  Fixture f;
  const auto r = search::run_search(f.ds, f.mc, f.cfg);
  const auto fresh = search::retrain_init(r, f.mc, 2, f.cfg);
  CHECK(fresh.config.candidates == std::vector<std::size_t>{2});
  CHECK(fresh.params.candidate_stacks.size() == 1);
  CHECK_FALSE(fresh.params.long_stack == r.searched.params.long_stack);

  f.cfg.warm_start = true;
  const auto warm = search::retrain_init(r, f.mc, 2, f.cfg);
  CHECK(warm.params.long_stack == r.searched.params.long_stack);
  CHECK(warm.params.candidate_stacks[0] == r.searched.params.candidate_stacks[1]);
  CHECK(warm.arch.alpha == Tensor2(1, 1));
  CHECK_THROWS_AS(search::retrain_init(r, f.mc, 3, f.cfg), ConfigError);
}

TEST_CASE("exhaustive oracle trains one model per candidate") {
  Fixture f;
  auto tc = f.cfg.train;
  const std::size_t one[] = {2};
  const auto single = search::exhaustive_oracle(f.ds, f.mc, one, tc);
  CHECK(single.best_k == 2);
  REQUIRE(single.per_k.size() == 1);
  CHECK(single.per_k[0].epochs == tc.max_epochs);

  const std::size_t ks[] = {1, 2, 4};
  const auto all = search::exhaustive_oracle(f.ds, f.mc, ks, tc);
  REQUIRE(all.per_k.size() == 3);
  double best = -1.0;
  std::size_t best_k = 0;
  for (const auto& e : all.per_k) {
    if (e.val_mrr > best) {
      best = e.val_mrr;
      best_k = e.k;
    }
  }
  CHECK(all.best_k == best_k);
  CHECK(all.per_k[1].val_mrr == single.per_k[0].val_mrr);
  const std::size_t unordered[] = {2, 1};
  CHECK_THROWS_AS(search::exhaustive_oracle(f.ds, f.mc, unordered, tc), ConfigError);
}
