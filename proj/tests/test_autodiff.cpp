#include <cmath>

#include "automlp/errors.hpp"
#include "automlp/numkit/autodiff.hpp"
#include "automlp/numkit/grad_check.hpp"
#include "doctest.h"

using namespace automlp;
using namespace automlp::numkit;

namespace {

Tensor2 randn(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Tensor2 t(r, c);
  for (double& v : t.values()) v = scale * rng.normal();
  return t;
}

// Contracts an arbitrary-shaped output with fixed random weights so every
// output entry contributes a distinct coefficient to the scalar loss.
Var project(Tape& t, Var out, std::uint64_t seed) {
  Rng rng(seed);
  const Tensor2& v = t.value(out);
  const Var w = t.constant(randn(rng, v.rows(), v.cols()));
  return ad::sum(t, ad::mul(t, out, w));
}

double check(const LossBuilder& f, std::vector<Tensor2*> params) {
  const GradCheckReport r = grad_check(f, params, 1e-5);
  CAPTURE(r.worst_param);
  CAPTURE(r.worst_index);
  CAPTURE(r.worst_analytic);
  CAPTURE(r.worst_numeric);
  CHECK(r.max_rel_error <= 1e-4);
  return r.max_rel_error;
}

}  // namespace

TEST_CASE("grad_check examples") {
  Tensor2 theta = Tensor2::from_rows({{1.0, 2.0}});
  {
    Tape tape;
    const Var x = tape.leaf(theta);
    tape.backward(ad::sum(tape, ad::mul(tape, x, x)));
    CHECK(tape.grad(x)(0, 0) == 2.0);
    CHECK(tape.grad(x)(0, 1) == 4.0);
  }
  std::vector<Tensor2*> params{&theta};
  const auto r = grad_check(
      [](Tape& t, std::span<const Var> l) { return ad::sum(t, ad::mul(t, l[0], l[0])); }, params);
  CHECK(r.max_rel_error <= 1e-8);

  const auto r0 = grad_check(
      [](Tape& t, std::span<const Var> l) { return ad::scale(t, ad::sum(t, l[0]), 0.0); }, params);
  CHECK(r0.max_rel_error == 0.0);

  CHECK_THROWS_AS(grad_check([](Tape& t, std::span<const Var>) {
                    return t.constant(Tensor2(1, 1, std::nan("")));
                  }, params),
                  NumericalError);
}

TEST_CASE("untouched leaves receive exact zero gradients") {
  Tensor2 a = Tensor2::from_rows({{1, 2}});
  Tensor2 b = Tensor2::from_rows({{3, 4}});
  Tape tape;
  const Var va = tape.leaf(a);
  const Var vb = tape.leaf(b);
  tape.backward(ad::sum(tape, va));
  CHECK(tape.grad(vb) == Tensor2(1, 2, 0.0));
  CHECK(tape.grad(va) == Tensor2(1, 2, 1.0));
}

TEST_CASE("backward requires a scalar output") {
  Tensor2 a(2, 2, 1.0);
  Tape tape;
  const Var va = tape.leaf(a);
  CHECK_THROWS_AS(tape.backward(va), ShapeError);
}

TEST_CASE("primitive gradients match central differences") {
  Rng rng(17);
  Tensor2 a = randn(rng, 3, 4);
  Tensor2 b = randn(rng, 4, 5);
  Tensor2 c = randn(rng, 5, 4);
  Tensor2 d = randn(rng, 3, 4);
  Tensor2 row = randn(rng, 1, 4);
  Tensor2 gamma = randn(rng, 1, 4);
  Tensor2 beta = randn(rng, 1, 4);

  SUBCASE("matmul") {
    check([](Tape& t, auto l) { return project(t, ad::matmul(t, l[0], l[1]), 1); }, {&a, &b});
  }
  SUBCASE("matmul_nt") {
    check([](Tape& t, auto l) { return project(t, ad::matmul_nt(t, l[0], l[1]), 2); }, {&a, &c});
  }
  SUBCASE("add, sub, mul, scale") {
    check([](Tape& t, auto l) {
      const Var s = ad::add(t, ad::mul(t, l[0], l[1]), ad::scale(t, ad::sub(t, l[0], l[1]), -1.7));
      return project(t, s, 3);
    }, {&a, &d});
  }
  SUBCASE("add_row") {
    check([](Tape& t, auto l) { return project(t, ad::add_row(t, l[0], l[1]), 4); }, {&a, &row});
  }
  SUBCASE("gelu and relu") {
    check([](Tape& t, auto l) { return project(t, ad::activation(t, l[0], Activation::kGelu), 5); },
          {&a});
    check([](Tape& t, auto l) { return project(t, ad::activation(t, l[0], Activation::kRelu), 6); },
          {&a});
  }
  SUBCASE("layer_norm_rows with and without affine") {
    check([](Tape& t, auto l) {
      return project(t, ad::layer_norm_rows(t, l[0], l[1], l[2]), 7);
    }, {&a, &gamma, &beta});
    check([](Tape& t, auto l) {
      return project(t, ad::layer_norm_rows(t, l[0], std::nullopt, std::nullopt), 8);
    }, {&a});
  }
  SUBCASE("block_transpose and block_rows") {
    Tensor2 x = randn(rng, 6, 4);
    check([](Tape& t, auto l) { return project(t, ad::block_transpose(t, l[0], 3), 9); }, {&x});
    check([](Tape& t, auto l) { return project(t, ad::block_rows(t, l[0], 3, 1, 2), 10); }, {&x});
  }
  SUBCASE("concat_cols") {
    check([](Tape& t, auto l) { return project(t, ad::concat_cols(t, l[0], l[1]), 11); },
          {&a, &d});
  }
  SUBCASE("softmax_rows and weighted_sum") {
    Tensor2 alpha = randn(rng, 1, 3);
    Tensor2 x0 = randn(rng, 2, 4), x1 = randn(rng, 2, 4), x2 = randn(rng, 2, 4);
    check([](Tape& t, auto l) {
      const Var p = ad::softmax_rows(t, l[0]);
      const Var xs[] = {l[1], l[2], l[3]};
      return project(t, ad::weighted_sum(t, p, xs), 12);
    }, {&alpha, &x0, &x1, &x2});
  }
  SUBCASE("gather_rows and row_dots") {
    Tensor2 table = randn(rng, 6, 4);
    Tensor2 h = randn(rng, 2, 4);
    check([](Tape& t, auto l) {
      const std::uint32_t idx[] = {1, 0, 5, 2, 1, 3};
      const Var cands = ad::gather_rows(t, l[0], idx, true);
      return project(t, ad::row_dots(t, l[1], cands, 3), 13);
    }, {&table, &h});
  }
  SUBCASE("bce_mean") {
    Tensor2 scores = randn(rng, 4, 3, 2.0);
    check([](Tape& t, auto l) { return ad::bce_mean(t, l[0]); }, {&scores});
  }
}

TEST_CASE("gather_rows keeps the padding row out of the gradient") {
  Tensor2 table(3, 2, 1.0);
  Tape tape;
  const Var tv = tape.leaf(table);
  const std::uint32_t idx[] = {0, 2, 0};
  const Var g = ad::gather_rows(tape, tv, idx, true);
  CHECK(tape.value(g)(0, 0) == 0.0);
  CHECK(tape.value(g)(1, 0) == 1.0);
  tape.backward(ad::sum(tape, g));
  CHECK(tape.grad(tv)(0, 0) == 0.0);
  CHECK(tape.grad(tv)(2, 1) == 1.0);
  const std::uint32_t bad[] = {3};
  CHECK_THROWS_AS(ad::gather_rows(tape, tv, bad, true), LookupError);
}

TEST_CASE("bce_mean hand values") {
  Tape tape;
  const Var s = tape.constant(Tensor2::from_rows({{0.0, 0.0}}));
  CHECK(tape.value(ad::bce_mean(tape, s))(0, 0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}
