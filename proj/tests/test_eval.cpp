#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "automlp/data/synthetic.hpp"
#include "automlp/errors.hpp"
#include "automlp/eval/metrics.hpp"
#include "doctest.h"

using namespace automlp;
using numkit::Rng;

namespace {

data::SequenceDataset random_dataset(std::size_t users, std::size_t vocab, std::uint64_t seed) {
  data::SynthConfig sc;
  sc.num_users = users;
  sc.seq_len = 12;
  sc.vocab = vocab;
  sc.noise_rate = 0.99;
  Rng rng(seed);
  return data::build_sequences(data::synthesize_log(sc, rng), 8);
}

model::Model untrained(const data::SequenceDataset& ds, std::uint64_t seed) {
  model::ModelConfig c;
  c.max_len = ds.max_len;
  c.dim = 16;
  c.seq_hidden = 16;
  c.channel_hidden = 16;
  c.layers = 1;
  c.candidates = {2, 4};
  c.num_items = ds.num_items;
  Rng rng(seed);
  return model::Model::create(c, rng);
}

// Straight count over the candidate list, written without the library.
std::size_t count_rank(const std::vector<double>& s, std::size_t t) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != t && !(s[i] < s[t])) ++r;
  return r;
}

}  // namespace

TEST_CASE("rank of target examples") {
  const std::vector<double> unique_max = {0.2, 3.0, -1.0};
  CHECK(eval::rank_of_target(unique_max, 1) == 1);
  const std::vector<double> tied = {0.7, 0.7, 0.7, 0.1};
  CHECK(eval::rank_of_target(tied, 0) == 3);
  const std::vector<double> hand = {0.1, 0.9, 0.5};
  CHECK(eval::rank_of_target(hand, 2) == 2);
  CHECK_THROWS_AS(eval::rank_of_target(hand, 3), ArgumentError);
}

TEST_CASE("rank agrees with a direct count on random scores") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + rng.uniform_int(30));
    // Coarse values so ties occur often.
    for (double& v : s) v = static_cast<double>(rng.uniform_int(6));
    const std::size_t t = rng.uniform_int(s.size());
    CHECK(eval::rank_of_target(s, t) == count_rank(s, t));
  }
}

TEST_CASE("metrics at n hand values") {
  const std::size_t ones[] = {1, 1, 1};
  auto m = eval::metrics_at_n(ones, 10);
  CHECK(m.hr == 1.0);
  CHECK(m.ndcg == 1.0);
  CHECK(m.mrr == 1.0);
  CHECK(m.count == 3);

  const std::size_t three[] = {3};
  m = eval::metrics_at_n(three, 10);
  CHECK(m.hr == 1.0);
  CHECK(m.ndcg == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.mrr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const std::size_t eleven[] = {11};
  m = eval::metrics_at_n(eleven, 10);
  CHECK(m.hr == 0.0);
  CHECK(m.ndcg == 0.0);
  CHECK(m.mrr == 0.0);

  const std::size_t mix[] = {1, 2, 20, 4};
  m = eval::metrics_at_n(mix, 5);
  CHECK(m.hr == doctest::Approx(0.75));
  CHECK(m.ndcg == doctest::Approx((1.0 + 1.0 / std::log2(3.0) + 1.0 / std::log2(5.0)) / 4.0));
  CHECK(m.mrr == doctest::Approx((1.0 + 0.5 + 0.25) / 4.0));
  CHECK(m.n == 5);
}

TEST_CASE("metrics reject empty or zero ranks") {
  CHECK_THROWS_AS(eval::metrics_at_n(std::span<const std::size_t>{}, 10), ArgumentError);
  const std::size_t zero[] = {0};
  CHECK_THROWS_AS(eval::metrics_at_n(zero, 10), ArgumentError);
}

TEST_CASE("hit ratio dominates ndcg which dominates mrr") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> ranks(1 + rng.uniform_int(50));
    for (auto& r : ranks) r = 1 + rng.uniform_int(30);
    const auto m = eval::metrics_at_n(ranks, 1 + rng.uniform_int(20));
    CHECK(m.hr >= m.ndcg);
    CHECK(m.ndcg >= m.mrr);
    CHECK((m.mrr > 0.0) == (m.hr > 0.0));
  }
}

TEST_CASE("ranks are invariant under strictly increasing transforms") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(10);
    for (double& v : s) v = rng.uniform(-3.0, 3.0);
    std::vector<double> e(s.size()), c(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      e[i] = std::exp(s[i]);
      c[i] = 2.5 * s[i] * s[i] * s[i] + 4.0;
    }
    const std::size_t t = rng.uniform_int(s.size());
    CHECK(eval::rank_of_target(e, t) == eval::rank_of_target(s, t));
    CHECK(eval::rank_of_target(c, t) == eval::rank_of_target(s, t));
  }
}

TEST_CASE("model ranks are unchanged by positive rescaling of the output layer") {
  const auto ds = random_dataset(60, 80, 4);
  const auto pop = data::PopularityDist::from_dataset(ds);
  eval::EvalConfig cfg;
  cfg.num_negatives = 20;
  auto m = untrained(ds, 6);
  const auto before = eval::rank_split(m, ds, data::Split::kTest, pop, cfg);
  for (double& v : m.params.out_W.values()) v *= 3.0;
  for (double& v : m.params.out_b.values()) v *= 3.0;
  CHECK(eval::rank_split(m, ds, data::Split::kTest, pop, cfg) == before);
}

TEST_CASE("evaluation leaves the model untouched and is repeatable") {
  const auto ds = random_dataset(60, 80, 5);
  const auto pop = data::PopularityDist::from_dataset(ds);
  const auto m = untrained(ds, 1);
  const auto copy = m;
  eval::EvalConfig cfg;
  cfg.num_negatives = 30;
  cfg.seed = 17;
  const auto a = eval::evaluate_split(m, ds, data::Split::kVal, pop, cfg);
  const auto b = eval::evaluate_split(m, ds, data::Split::kVal, pop, cfg);
  CHECK(m == copy);
  CHECK(a.hr == b.hr);
  CHECK(a.ndcg == b.ndcg);
  CHECK(a.mrr == b.mrr);
  CHECK(a.count == ds.val.size());
}

TEST_CASE("candidate lists are per user and independent of batching") {
  const auto ds = random_dataset(50, 120, 6);
  const auto pop = data::PopularityDist::from_dataset(ds);
  eval::EvalConfig cfg;
  cfg.num_negatives = 25;
  cfg.seed = 3;
  const auto lists = eval::candidate_lists(ds, data::Split::kTest, pop, cfg);
  const std::size_t width = cfg.num_negatives + 1;
  REQUIRE(lists.size() == ds.test.size() * width);
  for (std::size_t i = 0; i < ds.test.size(); ++i) {
    const auto& ex = ds.test[i];
    CHECK(lists[i * width] == ex.target);
    const auto seen = ds.interacted(ex.user);
    std::set<std::uint32_t> distinct;
    for (std::size_t j = 1; j < width; ++j) {
      const auto c = lists[i * width + j];
      CHECK_FALSE(std::binary_search(seen.begin(), seen.end(), c));
      distinct.insert(c);
    }
    CHECK(distinct.size() == cfg.num_negatives);
  }

  const auto m = untrained(ds, 2);
  auto small = cfg;
  small.batch_size = 7;
  CHECK(eval::rank_split(m, ds, data::Split::kTest, pop, small) ==
        eval::rank_split(m, ds, data::Split::kTest, pop, cfg));

  auto other = cfg;
  other.seed = 4;
  CHECK(eval::candidate_lists(ds, data::Split::kTest, pop, other) != lists);
  CHECK(eval::candidate_lists(ds, data::Split::kVal, pop, cfg) != lists);
}

TEST_CASE("a target scored far above its competitors ranks first") {
  std::vector<double> s(101, 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = -static_cast<double>(i);
  s[0] = 1e300;
  std::vector<std::size_t> ranks(50, eval::rank_of_target(s, 0));
  const auto m = eval::metrics_at_n(ranks, 10);
  CHECK(m.hr == 1.0);
  CHECK(m.ndcg == 1.0);
  CHECK(m.mrr == 1.0);
}

TEST_CASE("untrained model hit ratio sits at the sampling null") {
  const auto ds = random_dataset(600, 500, 12);
  const auto pop = data::PopularityDist::from_dataset(ds);
  eval::EvalConfig cfg;
  cfg.seed = 9;
  const auto m = eval::evaluate_split(untrained(ds, 31), ds, data::Split::kTest, pop, cfg);
  CHECK(m.count >= 500);
  CHECK(m.hr >= 0.05);
  CHECK(m.hr <= 0.15);
}

TEST_CASE("metrics record fields") {
  eval::RankingMetrics m{0.5, 0.4, 0.3, 10, 42};
  const auto j = eval::metrics_record(m, data::Split::kTest, 7);
  CHECK(j["split"] == "test");
  CHECK(j["n"] == 10);
  CHECK(j["hr"] == 0.5);
  CHECK(j["count"] == 42);
  CHECK(j["seed"] == 7);
}
