#include <cmath>
#include <sstream>

#include "automlp/errors.hpp"
#include "automlp/model/checkpoint.hpp"
#include "automlp/model/forward.hpp"
#include "automlp/numkit/grad_check.hpp"
#include "doctest.h"

using namespace automlp;
using namespace automlp::model;
using numkit::Tensor2;

namespace {

ModelConfig toy_config() {
  ModelConfig c;
  c.max_len = 6;
  c.dim = 8;
  c.seq_hidden = 8;
  c.channel_hidden = 8;
  c.layers = 1;
  c.candidates = {2, 3};
  c.num_items = 4;
  return c;
}

void zero_mixers(ModelParams& p) {
  auto zero = [](MixerLayerParams& l) {
    l.seq_W1.fill(0.0);
    l.seq_W2.fill(0.0);
    l.ch_W3.fill(0.0);
    l.ch_W4.fill(0.0);
  };
  for (auto& l : p.long_stack) zero(l);
  for (auto& s : p.candidate_stacks)
    for (auto& l : s) zero(l);
}

// ---- independent loop-based oracle ------------------------------------------

using Mat = std::vector<std::vector<double>>;

double gelu_ref(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

std::vector<double> ln_ref(const std::vector<double>& x, const Tensor2* g, const Tensor2* b) {
  const double n = static_cast<double>(x.size());
  double mean = 0, var = 0;
  for (double v : x) mean += v / n;
  for (double v : x) var += (v - mean) * (v - mean) / n;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = (x[i] - mean) / std::sqrt(var + 1e-5);
    if (g) y[i] = y[i] * (*g)(0, i) + (*b)(0, i);
  }
  return y;
}

// y = W2 g(W1 v) with W stored as Tensor2 (out x in).
std::vector<double> mlp_ref(const std::vector<double>& v, const Tensor2& w1, const Tensor2& w2) {
  std::vector<double> h(w1.rows(), 0.0), y(w2.rows(), 0.0);
  for (std::size_t r = 0; r < w1.rows(); ++r) {
    for (std::size_t c = 0; c < w1.cols(); ++c) h[r] += w1(r, c) * v[c];
    h[r] = gelu_ref(h[r]);
  }
  for (std::size_t r = 0; r < w2.rows(); ++r)
    for (std::size_t c = 0; c < w2.cols(); ++c) y[r] += w2(r, c) * h[c];
  return y;
}

// X: T rows of D.
Mat layer_ref(Mat x, const MixerLayerParams& l) {
  const std::size_t T = x.size(), D = x[0].size();
  Mat n(T);
  for (std::size_t t = 0; t < T; ++t) n[t] = ln_ref(x[t], &l.seq_gamma, &l.seq_beta);
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<double> col(T);
    for (std::size_t t = 0; t < T; ++t) col[t] = n[t][d];
    const auto y = mlp_ref(col, l.seq_W1, l.seq_W2);
    for (std::size_t t = 0; t < T; ++t) x[t][d] += y[t];
  }
  for (std::size_t t = 0; t < T; ++t) {
    const auto y = mlp_ref(ln_ref(x[t], &l.ch_gamma, &l.ch_beta), l.ch_W3, l.ch_W4);
    for (std::size_t d = 0; d < D; ++d) x[t][d] += y[d];
  }
  return x;
}

std::vector<double> interest_ref(const Mat& emb, std::size_t k,
                                 const std::vector<MixerLayerParams>& stack) {
  Mat x(emb.end() - static_cast<std::ptrdiff_t>(k), emb.end());
  for (const auto& l : stack) x = layer_ref(x, l);
  return x.back();
}

std::vector<double> hidden_ref(const std::vector<std::uint32_t>& seq, const ModelParams& p,
                               const ArchWeights& a) {
  Mat emb;
  for (auto i : seq) {
    auto r = p.item_embedding.row(i);
    emb.emplace_back(r.begin(), r.end());
  }
  const auto xl = interest_ref(emb, seq.size(), p.long_stack);
  const auto pr = numkit::softmax(a.alpha.row(0));
  std::vector<double> xs(xl.size(), 0.0);
  for (std::size_t m = 0; m < a.candidates.size(); ++m) {
    const auto o = interest_ref(emb, a.candidates[m], p.candidate_stacks[m]);
    for (std::size_t d = 0; d < xs.size(); ++d) xs[d] += pr[m] * o[d];
  }
  std::vector<double> cat = xs;
  cat.insert(cat.end(), xl.begin(), xl.end());
  const auto n = ln_ref(cat, nullptr, nullptr);
  std::vector<double> h(p.out_b.cols());
  for (std::size_t r = 0; r < h.size(); ++r) {
    h[r] = p.out_b(0, r);
    for (std::size_t c = 0; c < n.size(); ++c) h[r] += p.out_W(r, c) * n[c];
  }
  return h;
}

Tensor2 random_x(numkit::Rng& rng, std::size_t r, std::size_t c) {
  Tensor2 x(r, c);
  for (double& v : x.values()) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("init shapes and invariants") {
  const auto cfg = toy_config();
  numkit::Rng rng(1);
  const ModelParams p = init_params(cfg, rng);
  CHECK_NOTHROW(validate_params(p, cfg));
  for (double v : p.item_embedding.row(0)) CHECK(v == 0.0);
  CHECK(p.candidate_stacks[0][0].seq_W1.cols() == 2);
  CHECK(p.candidate_stacks[1][0].seq_W2.rows() == 3);
  CHECK(p.long_stack[0].seq_W1.cols() == 6);
  const ArchWeights a = init_arch(cfg);
  CHECK(a.alpha == Tensor2(1, 2, 0.0));
  ModelConfig bad = cfg;
  bad.candidates = {3, 2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.candidates = {6};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("embed") {
  auto cfg = toy_config();
  numkit::Rng rng(2);
  ModelParams p = init_params(cfg, rng);
  const std::vector<std::uint32_t> pad(6, 0);
  CHECK(embed(pad, p, cfg) == Tensor2(6, 8, 0.0));
  const std::vector<std::uint32_t> two{3, 4};
  const Tensor2 e = embed(two, p, cfg);
  for (std::size_t d = 0; d < 8; ++d) {
    CHECK(e(0, d) == p.item_embedding(3, d));
    CHECK(e(1, d) == p.item_embedding(4, d));
  }
  const std::vector<std::uint32_t> bad{5};
  CHECK_THROWS_AS(embed(bad, p, cfg), LookupError);

  SUBCASE("two features fused by averaging weights") {
    cfg.feature_cardinalities = {3};
    ModelParams pf = init_params(cfg, rng);
    pf.fusion_W.fill(0.0);
    for (std::size_t d = 0; d < 8; ++d) {
      pf.fusion_W(d, d) = 0.5;
      pf.fusion_W(d, 8 + d) = 0.5;
    }
    std::vector<std::vector<std::uint32_t>> feats(5, std::vector<std::uint32_t>{0});
    feats[1] = {2};
    feats[2] = {3};
    const std::vector<std::uint32_t> in{0, 1, 2};
    const Tensor2 ef = embed(in, pf, cfg, feats);
    for (std::size_t d = 0; d < 8; ++d) {
      CHECK(ef(0, d) == 0.0);
      CHECK(ef(1, d) == doctest::Approx(0.5 * (pf.item_embedding(1, d) + pf.feature_embeddings[0](2, d))));
      CHECK(ef(2, d) == doctest::Approx(0.5 * (pf.item_embedding(2, d) + pf.feature_embeddings[0](3, d))));
    }
  }
}

TEST_CASE("mixers are residual identities with zero inner weights") {
  const auto cfg = toy_config();
  numkit::Rng rng(3);
  ModelParams p = init_params(cfg, rng);
  MixerLayerParams l = p.long_stack[0];
  const Tensor2 x = random_x(rng, 6, 8);

  MixerLayerParams z = l;
  z.seq_W1.fill(0.0);
  z.seq_W2.fill(0.0);
  CHECK(sequence_mixer(numkit::transpose(x), z, cfg) == numkit::transpose(x));
  z = l;
  z.seq_W2.fill(0.0);
  CHECK(sequence_mixer(numkit::transpose(x), z, cfg) == numkit::transpose(x));
  z = l;
  z.ch_W3.fill(0.0);
  z.ch_W4.fill(0.0);
  CHECK(channel_mixer(x, z, cfg) == x);

  zero_mixers(p);
  for (std::size_t layers : {1u, 3u}) {
    std::vector<MixerLayerParams> stack(layers, p.long_stack[0]);
    CHECK(srsmlp_forward(x, stack, cfg) == x);
  }
  const Tensor2 last = interest_forward(x, 6, p.long_stack, cfg);
  for (std::size_t d = 0; d < 8; ++d) CHECK(last(0, d) == x(5, d));
}

TEST_CASE("sequence mixer hand oracle, T=2 D=1") {
  ModelConfig cfg = toy_config();
  cfg.dim = 1;
  cfg.max_len = 2;
  cfg.candidates = {1};
  MixerLayerParams l;
  l.seq_W1 = Tensor2::from_rows({{0.5, -1.0}});
  l.seq_W2 = Tensor2::from_rows({{2.0}, {0.25}});
  const Tensor2 x = Tensor2::from_rows({{1.0, 3.0}});  // D x T

  SUBCASE("channel axis: a single channel normalizes to beta") {
    l.seq_gamma = Tensor2(1, 1, 1.0);
    l.seq_beta = Tensor2(1, 1, 0.3);
    const double h = gelu_ref(0.5 * 0.3 - 1.0 * 0.3);
    const Tensor2 y = sequence_mixer(x, l, cfg);
    CHECK(y(0, 0) == doctest::Approx(1.0 + 2.0 * h).epsilon(1e-12));
    CHECK(y(0, 1) == doctest::Approx(3.0 + 0.25 * h).epsilon(1e-12));
  }
  SUBCASE("sequence axis: the literal row-wise reading") {
    cfg.norm_axis = NormAxis::kSequence;
    l.seq_gamma = Tensor2(1, 2, 1.0);
    l.seq_beta = Tensor2(1, 2, 0.0);
    const double s = 1.0 / std::sqrt(1.0 + 1e-5);  // var of [1,3] is 1
    const double h = gelu_ref(0.5 * -s - 1.0 * s);
    const Tensor2 y = sequence_mixer(x, l, cfg);
    CHECK(y(0, 0) == doctest::Approx(1.0 + 2.0 * h).epsilon(1e-12));
    CHECK(y(0, 1) == doctest::Approx(3.0 + 0.25 * h).epsilon(1e-12));
  }
}

TEST_CASE("channel mixer hand oracle, D=2 T=1, and row independence") {
  ModelConfig cfg = toy_config();
  cfg.dim = 2;
  MixerLayerParams l;
  l.ch_W3 = Tensor2::from_rows({{1.0, 2.0}});      // R_c = 1
  l.ch_W4 = Tensor2::from_rows({{0.5}, {-1.5}});
  l.ch_gamma = Tensor2::from_rows({{1.0, 1.0}});
  l.ch_beta = Tensor2::from_rows({{0.0, 0.0}});
  const Tensor2 x = Tensor2::from_rows({{2.0, 4.0}, {2.0, 4.0}});
  const double s = 1.0 / std::sqrt(1.0 + 1e-5);  // normalized [-s, s]
  const double h = gelu_ref(-s + 2.0 * s);
  const Tensor2 y = channel_mixer(x, l, cfg);
  CHECK(y(0, 0) == doctest::Approx(2.0 + 0.5 * h).epsilon(1e-12));
  CHECK(y(0, 1) == doctest::Approx(4.0 - 1.5 * h).epsilon(1e-12));
  CHECK(y(1, 0) == y(0, 0));
  CHECK(y(1, 1) == y(0, 1));
}

TEST_CASE("srsmlp composition") {
  ModelConfig cfg = toy_config();
  numkit::Rng rng(4);
  ModelConfig two = cfg;
  two.layers = 2;
  const ModelParams p = init_params(two, rng);
  const Tensor2 x = random_x(rng, 6, 8);
  const auto& l0 = p.long_stack[0];
  const auto& l1 = p.long_stack[1];
  const Tensor2 manual =
      channel_mixer(numkit::transpose(sequence_mixer(numkit::transpose(x), l0, cfg)), l0, cfg);
  const Tensor2 one = srsmlp_forward(x, std::span(&l0, 1), cfg);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == doctest::Approx(manual[i]).epsilon(1e-13));
  const Tensor2 both = srsmlp_forward(x, p.long_stack, cfg);
  const Tensor2 chained = srsmlp_forward(one, std::span(&l1, 1), cfg);
  for (std::size_t i = 0; i < both.size(); ++i) CHECK(both[i] == doctest::Approx(chained[i]).epsilon(1e-13));
}

TEST_CASE("interest_forward windowing") {
  const auto cfg = toy_config();
  numkit::Rng rng(5);
  const ModelParams p = init_params(cfg, rng);
  Tensor2 x = random_x(rng, 6, 8);
  const Tensor2 base = interest_forward(x, 2, p.candidate_stacks[0], cfg);
  for (std::size_t r = 0; r < 4; ++r)
    for (double& v : x.row(r)) v += 10.0;
  CHECK(interest_forward(x, 2, p.candidate_stacks[0], cfg) == base);
  CHECK_THROWS_AS(interest_forward(x, 7, p.long_stack, cfg), ArgumentError);
}

TEST_CASE("mixture_short_term") {
  auto cfg = toy_config();
  numkit::Rng rng(6);
  const ModelParams p = init_params(cfg, rng);
  const Tensor2 x = random_x(rng, 6, 8);
  const Tensor2 u = interest_forward(x, 2, p.candidate_stacks[0], cfg);
  const Tensor2 v = interest_forward(x, 3, p.candidate_stacks[1], cfg);
  ArchWeights a = init_arch(cfg);
  Tensor2 m = mixture_short_term(x, a, p.candidate_stacks, cfg);
  for (std::size_t d = 0; d < 8; ++d) CHECK(m(0, d) == doctest::Approx((u(0, d) + v(0, d)) / 2));
  a.alpha(0, 1) = std::log(2.0);
  m = mixture_short_term(x, a, p.candidate_stacks, cfg);
  for (std::size_t d = 0; d < 8; ++d)
    CHECK(m(0, d) == doctest::Approx(u(0, d) / 3 + 2 * v(0, d) / 3).epsilon(1e-12));

  ArchWeights single{{2}, Tensor2(1, 1, 0.7)};
  std::vector<std::vector<MixerLayerParams>> one{p.candidate_stacks[0]};
  CHECK(mixture_short_term(x, single, one, cfg) == u);
  CHECK_THROWS_AS(mixture_short_term(x, single, p.candidate_stacks, cfg), ConfigError);
}

TEST_CASE("fuse_output and score_items") {
  auto cfg = toy_config();
  numkit::Rng rng(7);
  ModelParams p = init_params(cfg, rng);
  for (double& v : p.out_b.values()) v = rng.normal();
  const Tensor2 xs = random_x(rng, 1, 8), xl = random_x(rng, 1, 8);
  ModelParams z = p;
  z.out_W.fill(0.0);
  CHECK(fuse_output(xs, xl, z) == p.out_b);
  const Tensor2 c(1, 8, 2.5);
  const Tensor2 h = fuse_output(c, c, p);
  for (std::size_t d = 0; d < 8; ++d) CHECK(h(0, d) == p.out_b(0, d));

  SUBCASE("D=2 hand computation") {
    ModelParams q;
    q.out_W = Tensor2::from_rows({{1, 0, 0, 0}, {0, 1, 1, 1}});
    q.out_b = Tensor2::from_rows({{0.5, -0.5}});
    const Tensor2 a = Tensor2::from_rows({{1.0, 2.0}}), b = Tensor2::from_rows({{3.0, 4.0}});
    // concat [1,2,3,4]: mean 2.5, var 1.25
    const double inv = 1.0 / std::sqrt(1.25 + 1e-5);
    const Tensor2 out = fuse_output(a, b, q);
    CHECK(out(0, 0) == doctest::Approx(0.5 + (1 - 2.5) * inv).epsilon(1e-12));
    CHECK(out(0, 1) == doctest::Approx(-0.5 + ((2 - 2.5) + (3 - 2.5) + (4 - 2.5)) * inv).epsilon(1e-12));
  }

  ModelParams s;
  s.item_embedding = Tensor2::from_rows({{0, 0}, {2, 0}, {0, 5}, {2, 0}});
  const std::uint32_t cands[] = {1, 2};
  const auto sc = score_items(Tensor2::from_rows({{1, 0}}), cands, s);
  CHECK(sc.probabilities[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(sc.probabilities[1] == doctest::Approx(0.1192).epsilon(1e-3));
  CHECK(sc.dots[0] == 2.0);
  const std::uint32_t same[] = {1, 3};
  for (double v : score_items(Tensor2::from_rows({{0.3, 0.1}}), same, s).probabilities) CHECK(v == 0.5);
  for (double v : score_items(Tensor2(1, 2, 0.0), cands, s).probabilities) CHECK(v == 0.5);
  CHECK_THROWS_AS(score_items(Tensor2(1, 2), std::span<const std::uint32_t>{}, s), ArgumentError);
}

TEST_CASE("batched hidden state matches the loop oracle") {
  auto cfg = toy_config();
  cfg.layers = 2;
  numkit::Rng rng(8);
  ModelParams p = init_params(cfg, rng);
  for (auto* t : p.tensors())
    for (double& v : t->values()) v += 0.1 * rng.normal();
  p.zero_padding_rows();
  ArchWeights a = init_arch(cfg);
  a.alpha = Tensor2::from_rows({{0.3, -0.2}});
  const std::vector<std::uint32_t> batch{0, 0, 1, 2, 3, 4, 4, 3, 2, 1, 1, 2};
  numkit::Tape t;
  const BoundParams b = bind(t, p, a);
  ForwardContext ctx;
  const Var h = hidden_batch(t, b, cfg, batch, {}, ctx);
  for (std::size_t r = 0; r < 2; ++r) {
    const std::vector<std::uint32_t> seq(batch.begin() + 6 * r, batch.begin() + 6 * (r + 1));
    const auto ref = hidden_ref(seq, p, a);
    for (std::size_t d = 0; d < 8; ++d) CHECK(t.value(h)(r, d) == doctest::Approx(ref[d]).epsilon(1e-10));
  }
}

TEST_CASE("zero-weight network gives zero hidden state and uniform scores") {
  auto cfg = toy_config();
  numkit::Rng rng(9);
  ModelParams p = init_params(cfg, rng);
  zero_mixers(p);
  p.out_W.fill(0.0);
  numkit::Tape t;
  const ArchWeights a = init_arch(cfg);
  const BoundParams b = bind(t, p, a);
  ForwardContext ctx;
  const std::vector<std::uint32_t> in{0, 1, 2, 3, 4, 1};
  const Var h = hidden_batch(t, b, cfg, in, {}, ctx);
  CHECK(t.value(h) == Tensor2(1, 8, 0.0));
  const std::uint32_t cands[] = {1, 2, 3, 4};
  for (double v : score_items(t.value(h), cands, p).probabilities) CHECK(v == 0.25);
}

TEST_CASE("padding content never reaches the output") {
  auto cfg = toy_config();
  numkit::Rng rng(10);
  ModelParams p = init_params(cfg, rng);
  const ArchWeights a = init_arch(cfg);
  const std::vector<std::uint32_t> in{0, 0, 1, 2, 3, 4};
  auto run = [&](const ModelParams& q) {
    numkit::Tape t;
    const BoundParams b = bind(t, q, a);
    ForwardContext ctx;
    return t.value(hidden_batch(t, b, cfg, in, {}, ctx));
  };
  const Tensor2 base = run(p);
  ModelParams q = p;
  for (double& v : q.item_embedding.row(0)) v = 42.0;
  CHECK(run(q) == base);
}

TEST_CASE("ablation flags turn mixers into identities") {
  auto cfg = toy_config();
  numkit::Rng rng(11);
  const ModelParams p = init_params(cfg, rng);
  const Tensor2 x = random_x(rng, 6, 8);
  ModelConfig noseq = cfg;
  noseq.disable_sequence_mixer = true;
  const Tensor2 a = srsmlp_forward(x, p.long_stack, noseq);
  CHECK(a == channel_mixer(x, p.long_stack[0], cfg));
  ModelConfig none = noseq;
  none.disable_channel_mixer = true;
  CHECK(srsmlp_forward(x, p.long_stack, none) == x);
}

TEST_CASE("full-model gradients match finite differences and reach every parameter") {
  auto cfg = toy_config();
  numkit::Rng rng(12);
  ModelParams p = init_params(cfg, rng);
  ArchWeights a = init_arch(cfg);
  a.alpha = Tensor2::from_rows({{0.2, -0.4}});
  // Move norm parameters off their defaults so their gradients are generic.
  for (auto* t : p.tensors())
    for (double& v : t->values()) v += 0.05 * rng.normal();
  p.zero_padding_rows();

  const std::vector<std::uint32_t> inputs{0, 1, 2, 3, 4, 2, 0, 0, 4, 1, 3, 2};
  const std::vector<std::uint32_t> cands{1, 3, 2, 4, 2, 1};
  auto params = p.tensors();
  params.push_back(&a.alpha);

  numkit::LossBuilder f = [&](numkit::Tape& t, std::span<const numkit::Var> leaves) {
    BoundParams b = bind_leaves(p, leaves);
    ForwardContext ctx;
    const Var h = hidden_batch(t, b, cfg, inputs, {}, ctx);
    return numkit::ad::bce_mean(t, candidate_scores(t, b, h, cands, 3));
  };
  const auto report = numkit::grad_check(f, params, 1e-5);
  CAPTURE(report.worst_param);
  CAPTURE(report.worst_analytic);
  CAPTURE(report.worst_numeric);
  CHECK(report.max_rel_error <= 1e-4);

  numkit::Tape t;
  BoundParams b = bind(t, p, a);
  ForwardContext ctx;
  const Var h = hidden_batch(t, b, cfg, inputs, {}, ctx);
  t.backward(numkit::ad::bce_mean(t, candidate_scores(t, b, h, cands, 3)));
  const auto names = p.names();
  for (std::size_t i = 0; i < b.weights.size(); ++i) {
    CAPTURE(names[i]);
    double norm = 0.0;
    for (double g : t.grad(b.weights[i]).values()) norm += g * g;
    CHECK(norm > 0.0);
  }
  double anorm = 0.0;
  for (double g : t.grad(b.alpha).values()) anorm += g * g;
  CHECK(anorm > 0.0);
  for (double g : t.grad(b.item_embedding).row(0)) CHECK(g == 0.0);
}

TEST_CASE("single-candidate mixture has exactly zero alpha gradient") {
  auto cfg = toy_config();
  cfg.candidates = {2};
  numkit::Rng rng(13);
  const ModelParams p = init_params(cfg, rng);
  const ArchWeights a = init_arch(cfg);
  numkit::Tape t;
  BoundParams b = bind(t, p, a);
  ForwardContext ctx;
  const std::vector<std::uint32_t> in{1, 2, 3, 4, 1, 2};
  const std::uint32_t cands[] = {3, 1};
  const Var h = hidden_batch(t, b, cfg, in, {}, ctx);
  t.backward(numkit::ad::bce_mean(t, candidate_scores(t, b, h, cands, 2)));
  CHECK(t.grad(b.alpha)(0, 0) == 0.0);
}

TEST_CASE("checkpoint round trip and validation") {
  auto cfg = toy_config();
  cfg.feature_cardinalities = {3, 2};
  numkit::Rng rng(14);
  Checkpoint c{cfg, init_params(cfg, rng), init_arch(cfg), {{"note", "x"}}};
  c.arch.alpha(0, 1) = -0.125;
  std::stringstream buf;
  write_checkpoint(buf, c);
  const Checkpoint back = read_checkpoint(buf);
  CHECK(back.config == c.config);
  CHECK(back.params == c.params);
  CHECK(back.arch == c.arch);
  CHECK(back.metadata == c.metadata);

  std::string bytes;
  {
    std::stringstream b2;
    write_checkpoint(b2, c);
    bytes = b2.str();
  }
  std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_checkpoint(truncated), DataError);
  std::stringstream garbage("not a checkpoint");
  CHECK_THROWS_AS(read_checkpoint(garbage), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.ckpt"), IoError);

  // A header whose tensor list disagrees with its config is rejected.
  Checkpoint other = c;
  other.config.seq_hidden = 5;
  other.params = init_params(other.config, rng);
  std::stringstream ob;
  write_checkpoint(ob, other);
  std::string tampered = ob.str();
  const auto pos = tampered.find("\"seq_hidden\":5");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 14, "\"seq_hidden\":8");
  std::stringstream tb(tampered);
  CHECK_THROWS_AS(read_checkpoint(tb), DataError);
}
