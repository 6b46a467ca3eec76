#pragma once

// Reverse-mode differentiation over Tensor2 values.
//
// A Tape records every primitive applied during a forward pass together with a
// closure that pushes the output gradient back to the inputs. backward() walks
// the record in reverse once. Leaves created with leaf() reference external
// storage (model parameters) without copying it; that storage must outlive the
// tape and must not change while the tape is alive.
//
// A tape is single-owner: never share one across threads.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "automlp/numkit/ops.hpp"
#include "automlp/numkit/tensor.hpp"

namespace automlp::numkit {

struct Var {
  static constexpr std::uint32_t kInvalid = 0xffffffffu;
  std::uint32_t id = kInvalid;
  bool valid() const noexcept { return id != kInvalid; }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, Var out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Tensor2 value);
  // Leaf referencing `value` in place; differentiable unless requires_grad
  // is false.
  Var leaf(const Tensor2& value, bool requires_grad = true);
  // Differentiable leaf owning its value.
  Var variable(Tensor2 value);
  // Records an op output. `fn` may be empty when no input requires a gradient.
  Var record(Tensor2 value, bool requires_grad, BackwardFn fn);

  const Tensor2& value(Var v) const;
  bool requires_grad(Var v) const { return node(v).requires_grad; }

  // Seeds d(out)/d(out) = 1 for a 1x1 output and propagates to every node.
  // Afterwards every leaf has a gradient; leaves the output does not depend on
  // get exact zeros.
  void backward(Var out);
  const Tensor2& grad(Var v) const;

  // For op implementations: the gradient buffer of `v`, zero-initialized on
  // first access.
  Tensor2& grad_buffer(Var v);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor2 owned;
    const Tensor2* ref = nullptr;
    Tensor2 grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_leaf = false;
  };
  const Node& node(Var v) const;
  Node& node(Var v);

  std::vector<Node> nodes_;
};

namespace ad {

Var matmul(Tape& t, Var a, Var b);
// a * b^T; the usual linear-layer form x W^T.
Var matmul_nt(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
// Adds a 1xC row to every row of a.
Var add_row(Tape& t, Var a, Var row);
// Elementwise product.
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double s);
Var activation(Tape& t, Var a, Activation act);
// Row-wise layer normalization. gamma/beta are 1xC rows; when absent the
// affine step is skipped.
Var layer_norm_rows(Tape& t, Var x, std::optional<Var> gamma, std::optional<Var> beta,
                    double eps = kLayerNormEps);
// x stacks B blocks of R rows each; every block is transposed in place of
// itself, giving B blocks of C rows.
Var block_transpose(Tape& t, Var x, std::size_t block_rows);
// Rows [start, start+count) of every block of `block_rows` rows.
Var block_rows(Tape& t, Var x, std::size_t block_rows, std::size_t start, std::size_t count);
Var concat_cols(Tape& t, Var a, Var b);
Var softmax_rows(Tape& t, Var x);
// sum_m p[0, m] * xs[m]; p is 1xM.
Var weighted_sum(Tape& t, Var p, std::span<const Var> xs);
// Rows of `table` selected by `indices`. With `padding_zero`, index 0 yields a
// zero row and never receives gradient.
Var gather_rows(Tape& t, Var table, std::span<const std::uint32_t> indices, bool padding_zero);
// out[b, j] = h[b] . cands[b * n + j]
Var row_dots(Tape& t, Var h, Var cands, std::size_t n);
// Mean over rows of -[log sigmoid(s[b,0]) + sum_{j>0} log(1 - sigmoid(s[b,j]))].
Var bce_mean(Tape& t, Var scores);
Var sum(Tape& t, Var a);

}  // namespace ad

}  // namespace automlp::numkit
