#include "automlp/numkit/autodiff.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "automlp/errors.hpp"
#include "automlp/numkit/kernels.hpp"

namespace automlp::numkit {

// ---- Tape ------------------------------------------------------------------

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw ArgumentError("tape: invalid variable");
  return nodes_[v.id];
}

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.id >= nodes_.size()) throw ArgumentError("tape: invalid variable");
  return nodes_[v.id];
}

Var Tape::constant(Tensor2 value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(const Tensor2& value, bool requires_grad) {
  Node n;
  n.ref = &value;
  n.requires_grad = requires_grad;
  n.is_leaf = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::variable(Tensor2 value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  n.is_leaf = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::record(Tensor2 value, bool requires_grad, BackwardFn fn) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor2& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.ref != nullptr ? *n.ref : n.owned;
}

Tensor2& Tape::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.empty()) {
    const Tensor2& val = n.ref != nullptr ? *n.ref : n.owned;
    n.grad = Tensor2(val.rows(), val.cols());
  }
  return n.grad;
}

const Tensor2& Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.empty() && !(value(v).empty())) {
    throw ArgumentError("tape: gradient requested before backward() or for a constant");
  }
  return n.grad;
}

void Tape::backward(Var out) {
  const Tensor2& ov = value(out);
  if (ov.rows() != 1 || ov.cols() != 1) {
    throw ShapeError("backward: output must be 1x1, got " + ov.shape_string());
  }
  grad_buffer(out)(0, 0) = 1.0;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, Var{static_cast<std::uint32_t>(i)});
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf) grad_buffer(Var{static_cast<std::uint32_t>(i)});
  }
}

// ---- primitives ------------------------------------------------------------

namespace ad {
namespace {

bool any_grad(const Tape& t, std::initializer_list<Var> vs) {
  for (Var v : vs)
    if (t.requires_grad(v)) return true;
  return false;
}

}  // namespace

Var matmul(Tape& t, Var a, Var b) {
  Tensor2 out = numkit::matmul(t.value(a), t.value(b));
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const Tensor2& av = tp.value(a);
    const Tensor2& bv = tp.value(b);
    const auto& k = kernels::active();
    if (tp.requires_grad(a)) {
      Tensor2& ga = tp.grad_buffer(a);
      k.gemm_nt(g.data(), bv.data(), ga.data(), g.rows(), g.cols(), bv.rows());
    }
    if (tp.requires_grad(b)) {
      Tensor2& gb = tp.grad_buffer(b);
      k.gemm_tn(av.data(), g.data(), gb.data(), av.cols(), av.rows(), g.cols());
    }
  });
}

Var matmul_nt(Tape& t, Var a, Var b) {
  Tensor2 out = numkit::matmul_nt(t.value(a), t.value(b));
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const Tensor2& av = tp.value(a);
    const Tensor2& bv = tp.value(b);
    const auto& k = kernels::active();
    if (tp.requires_grad(a)) {
      Tensor2& ga = tp.grad_buffer(a);
      k.gemm_nn(g.data(), bv.data(), ga.data(), g.rows(), g.cols(), bv.cols());
    }
    if (tp.requires_grad(b)) {
      Tensor2& gb = tp.grad_buffer(b);
      k.gemm_tn(g.data(), av.data(), gb.data(), g.cols(), g.rows(), av.cols());
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  const Tensor2& av = t.value(a);
  require_same_shape(av, t.value(b), "add");
  Tensor2 out = av;
  const auto& bv = t.value(b).values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += bv[i];
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    for (Var v : {a, b}) {
      if (!tp.requires_grad(v)) continue;
      kernels::active().axpy(1.0, g.data(), tp.grad_buffer(v).data(), g.size());
    }
  });
}

Var sub(Tape& t, Var a, Var b) {
  const Tensor2& av = t.value(a);
  require_same_shape(av, t.value(b), "sub");
  Tensor2 out = av;
  const auto& bv = t.value(b).values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] -= bv[i];
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    if (tp.requires_grad(a)) kernels::active().axpy(1.0, g.data(), tp.grad_buffer(a).data(), g.size());
    if (tp.requires_grad(b)) kernels::active().axpy(-1.0, g.data(), tp.grad_buffer(b).data(), g.size());
  });
}

Var add_row(Tape& t, Var a, Var row) {
  const Tensor2& av = t.value(a);
  const Tensor2& rv = t.value(row);
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw ShapeError("add_row: cannot broadcast " + rv.shape_string() + " over " +
                     av.shape_string());
  }
  Tensor2 out = av;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto orow = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) orow[c] += rv(0, c);
  }
  return t.record(std::move(out), any_grad(t, {a, row}), [a, row](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    if (tp.requires_grad(a)) kernels::active().axpy(1.0, g.data(), tp.grad_buffer(a).data(), g.size());
    if (tp.requires_grad(row)) {
      Tensor2& gr = tp.grad_buffer(row);
      for (std::size_t r = 0; r < g.rows(); ++r)
        kernels::active().axpy(1.0, g.row(r).data(), gr.data(), g.cols());
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  const Tensor2& av = t.value(a);
  const Tensor2& bv = t.value(b);
  require_same_shape(av, bv, "mul");
  Tensor2 out(av.rows(), av.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    if (tp.requires_grad(a)) {
      Tensor2& ga = tp.grad_buffer(a);
      const Tensor2& bv2 = tp.value(b);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv2[i];
    }
    if (tp.requires_grad(b)) {
      Tensor2& gb = tp.grad_buffer(b);
      const Tensor2& av2 = tp.value(a);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av2[i];
    }
  });
}

Var scale(Tape& t, Var a, double s) {
  Tensor2 out = t.value(a);
  for (double& v : out.values()) v *= s;
  return t.record(std::move(out), t.requires_grad(a), [a, s](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    kernels::active().axpy(s, g.data(), tp.grad_buffer(a).data(), g.size());
  });
}

Var activation(Tape& t, Var a, Activation act) {
  const Tensor2& av = t.value(a);
  Tensor2 out(av.rows(), av.cols());
  if (!t.requires_grad(a)) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = activate(av[i], act);
    return t.record(std::move(out), false, {});
  }
  // The derivative is produced alongside the value so backward needs no
  // second pass through erf.
  auto deriv = std::make_shared<Tensor2>(av.rows(), av.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av[i];
    if (act == Activation::kGelu) {
      const double cdf = 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
      out[i] = x * cdf;
      (*deriv)[i] = cdf + x * std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
    } else {
      out[i] = x > 0.0 ? x : 0.0;
      (*deriv)[i] = x > 0.0 ? 1.0 : 0.0;
    }
  }
  return t.record(std::move(out), true, [a, deriv](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    Tensor2& ga = tp.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (*deriv)[i];
  });
}

Var layer_norm_rows(Tape& t, Var x, std::optional<Var> gamma, std::optional<Var> beta,
                    double eps) {
  const Tensor2& xv = t.value(x);
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  if (eps < 0.0) throw ArgumentError("layer_norm: eps must be non-negative");
  for (const auto& p : {gamma, beta}) {
    if (p && (t.value(*p).rows() != 1 || t.value(*p).cols() != cols)) {
      throw ShapeError("layer_norm: parameter shape " + t.value(*p).shape_string() +
                       " does not match row length " + std::to_string(cols));
    }
  }
  auto xhat = std::make_shared<Tensor2>(rows, cols);
  auto inv = std::make_shared<std::vector<double>>(rows);
  Tensor2 out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto xr = xv.row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(cols);
    const double denom = var + eps;
    (*inv)[r] = denom > 0.0 ? 1.0 / std::sqrt(denom) : 0.0;
    auto hr = xhat->row(r);
    auto orow = out.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      hr[c] = (xr[c] - mean) * (*inv)[r];
      double y = hr[c];
      if (gamma) y *= t.value(*gamma)(0, c);
      if (beta) y += t.value(*beta)(0, c);
      orow[c] = y;
    }
  }
  bool needs = t.requires_grad(x) || (gamma && t.requires_grad(*gamma)) ||
               (beta && t.requires_grad(*beta));
  return t.record(std::move(out), needs, [x, gamma, beta, xhat, inv](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const std::size_t rows2 = g.rows();
    const std::size_t cols2 = g.cols();
    const double n = static_cast<double>(cols2);
    if (gamma && tp.requires_grad(*gamma)) {
      Tensor2& gg = tp.grad_buffer(*gamma);
      for (std::size_t r = 0; r < rows2; ++r)
        for (std::size_t c = 0; c < cols2; ++c) gg(0, c) += g(r, c) * (*xhat)(r, c);
    }
    if (beta && tp.requires_grad(*beta)) {
      Tensor2& gb = tp.grad_buffer(*beta);
      for (std::size_t r = 0; r < rows2; ++r)
        for (std::size_t c = 0; c < cols2; ++c) gb(0, c) += g(r, c);
    }
    if (tp.requires_grad(x)) {
      Tensor2& gx = tp.grad_buffer(x);
      std::vector<double> dxhat(cols2);
      for (std::size_t r = 0; r < rows2; ++r) {
        double mean_d = 0.0;
        double mean_dx = 0.0;
        for (std::size_t c = 0; c < cols2; ++c) {
          dxhat[c] = g(r, c) * (gamma ? tp.value(*gamma)(0, c) : 1.0);
          mean_d += dxhat[c];
          mean_dx += dxhat[c] * (*xhat)(r, c);
        }
        mean_d /= n;
        mean_dx /= n;
        const double iv = (*inv)[r];
        for (std::size_t c = 0; c < cols2; ++c) {
          gx(r, c) += iv * (dxhat[c] - mean_d - (*xhat)(r, c) * mean_dx);
        }
      }
    }
  });
}

Var block_transpose(Tape& t, Var x, std::size_t block_rows) {
  const Tensor2& xv = t.value(x);
  if (block_rows == 0 || xv.rows() % block_rows != 0) {
    throw ShapeError("block_transpose: " + std::to_string(xv.rows()) +
                     " rows do not split into blocks of " + std::to_string(block_rows));
  }
  const std::size_t blocks = xv.rows() / block_rows;
  const std::size_t cols = xv.cols();
  Tensor2 out(blocks * cols, block_rows);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t r = 0; r < block_rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out(b * cols + c, r) = xv(b * block_rows + r, c);
  return t.record(std::move(out), t.requires_grad(x),
                  [x, blocks, block_rows, cols](Tape& tp, Var o) {
                    const Tensor2& g = tp.grad(o);
                    Tensor2& gx = tp.grad_buffer(x);
                    for (std::size_t b = 0; b < blocks; ++b)
                      for (std::size_t r = 0; r < block_rows; ++r)
                        for (std::size_t c = 0; c < cols; ++c)
                          gx(b * block_rows + r, c) += g(b * cols + c, r);
                  });
}

Var block_rows(Tape& t, Var x, std::size_t block_rows, std::size_t start, std::size_t count) {
  const Tensor2& xv = t.value(x);
  if (block_rows == 0 || xv.rows() % block_rows != 0) {
    throw ShapeError("block_rows: " + std::to_string(xv.rows()) +
                     " rows do not split into blocks of " + std::to_string(block_rows));
  }
  if (start + count > block_rows) {
    throw ArgumentError("block_rows: window [" + std::to_string(start) + ", " +
                        std::to_string(start + count) + ") exceeds block of " +
                        std::to_string(block_rows));
  }
  const std::size_t blocks = xv.rows() / block_rows;
  const std::size_t cols = xv.cols();
  Tensor2 out(blocks * count, cols);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < count; ++i) {
      const auto src = xv.row(b * block_rows + start + i);
      std::copy(src.begin(), src.end(), out.row(b * count + i).begin());
    }
  return t.record(std::move(out), t.requires_grad(x),
                  [x, blocks, block_rows, start, count, cols](Tape& tp, Var o) {
                    const Tensor2& g = tp.grad(o);
                    Tensor2& gx = tp.grad_buffer(x);
                    for (std::size_t b = 0; b < blocks; ++b)
                      for (std::size_t i = 0; i < count; ++i)
                        kernels::active().axpy(1.0, g.row(b * count + i).data(),
                                               gx.row(b * block_rows + start + i).data(), cols);
                  });
}

Var concat_cols(Tape& t, Var a, Var b) {
  const Tensor2& av = t.value(a);
  const Tensor2& bv = t.value(b);
  if (av.rows() != bv.rows()) {
    throw ShapeError("concat_cols: row mismatch " + av.shape_string() + " vs " +
                     bv.shape_string());
  }
  const std::size_t ca = av.cols();
  const std::size_t cb = bv.cols();
  Tensor2 out(av.rows(), ca + cb);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto orow = out.row(r);
    std::copy(av.row(r).begin(), av.row(r).end(), orow.begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), orow.begin() + static_cast<std::ptrdiff_t>(ca));
  }
  return t.record(std::move(out), any_grad(t, {a, b}), [a, b, ca, cb](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    if (tp.requires_grad(a)) {
      Tensor2& ga = tp.grad_buffer(a);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < ca; ++c) ga(r, c) += g(r, c);
    }
    if (tp.requires_grad(b)) {
      Tensor2& gb = tp.grad_buffer(b);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < cb; ++c) gb(r, c) += g(r, ca + c);
    }
  });
}

Var softmax_rows(Tape& t, Var x) {
  const Tensor2& xv = t.value(x);
  Tensor2 out(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    const auto s = numkit::softmax(xv.row(r));
    std::copy(s.begin(), s.end(), out.row(r).begin());
  }
  return t.record(std::move(out), t.requires_grad(x), [x](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const Tensor2& y = tp.value(o);
    Tensor2& gx = tp.grad_buffer(x);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var weighted_sum(Tape& t, Var p, std::span<const Var> xs) {
  const Tensor2& pv = t.value(p);
  if (pv.rows() != 1 || pv.cols() != xs.size() || xs.empty()) {
    throw ShapeError("weighted_sum: weights " + pv.shape_string() + " for " +
                     std::to_string(xs.size()) + " inputs");
  }
  const Tensor2& first = t.value(xs[0]);
  Tensor2 out(first.rows(), first.cols());
  bool needs = t.requires_grad(p);
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const Tensor2& xm = t.value(xs[m]);
    require_same_shape(first, xm, "weighted_sum");
    kernels::active().axpy(pv(0, m), xm.data(), out.data(), out.size());
    needs = needs || t.requires_grad(xs[m]);
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  return t.record(std::move(out), needs, [p, inputs](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const Tensor2& pv2 = tp.value(p);
    const auto& k = kernels::active();
    for (std::size_t m = 0; m < inputs.size(); ++m) {
      if (tp.requires_grad(inputs[m])) {
        k.axpy(pv2(0, m), g.data(), tp.grad_buffer(inputs[m]).data(), g.size());
      }
      if (tp.requires_grad(p)) {
        tp.grad_buffer(p)(0, m) += k.dot(g.data(), tp.value(inputs[m]).data(), g.size());
      }
    }
  });
}

Var gather_rows(Tape& t, Var table, std::span<const std::uint32_t> indices, bool padding_zero) {
  const Tensor2& tv = t.value(table);
  const std::size_t cols = tv.cols();
  Tensor2 out(indices.size(), cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::uint32_t idx = indices[i];
    if (idx >= tv.rows()) {
      throw LookupError("index " + std::to_string(idx) + " out of range for table with " +
                        std::to_string(tv.rows()) + " rows");
    }
    if (padding_zero && idx == 0) continue;
    std::copy(tv.row(idx).begin(), tv.row(idx).end(), out.row(i).begin());
  }
  std::vector<std::uint32_t> idx_copy(indices.begin(), indices.end());
  return t.record(std::move(out), t.requires_grad(table),
                  [table, idx_copy = std::move(idx_copy), padding_zero, cols](Tape& tp, Var o) {
                    const Tensor2& g = tp.grad(o);
                    Tensor2& gt = tp.grad_buffer(table);
                    for (std::size_t i = 0; i < idx_copy.size(); ++i) {
                      if (padding_zero && idx_copy[i] == 0) continue;
                      kernels::active().axpy(1.0, g.row(i).data(), gt.row(idx_copy[i]).data(),
                                             cols);
                    }
                  });
}

Var row_dots(Tape& t, Var h, Var cands, std::size_t n) {
  const Tensor2& hv = t.value(h);
  const Tensor2& cv = t.value(cands);
  if (cv.cols() != hv.cols() || cv.rows() != hv.rows() * n) {
    throw ShapeError("row_dots: " + std::to_string(n) + " candidates per row, h " +
                     hv.shape_string() + ", candidates " + cv.shape_string());
  }
  const std::size_t d = hv.cols();
  Tensor2 out(hv.rows(), n);
  const auto& k = kernels::active();
  for (std::size_t b = 0; b < hv.rows(); ++b)
    for (std::size_t j = 0; j < n; ++j) out(b, j) = k.dot(hv.row(b).data(), cv.row(b * n + j).data(), d);
  return t.record(std::move(out), any_grad(t, {h, cands}), [h, cands, n, d](Tape& tp, Var o) {
    const Tensor2& g = tp.grad(o);
    const Tensor2& hv2 = tp.value(h);
    const Tensor2& cv2 = tp.value(cands);
    const auto& k2 = kernels::active();
    for (std::size_t b = 0; b < g.rows(); ++b)
      for (std::size_t j = 0; j < n; ++j) {
        const double gj = g(b, j);
        if (gj == 0.0) continue;
        if (tp.requires_grad(h)) k2.axpy(gj, cv2.row(b * n + j).data(), tp.grad_buffer(h).row(b).data(), d);
        if (tp.requires_grad(cands)) k2.axpy(gj, hv2.row(b).data(), tp.grad_buffer(cands).row(b * n + j).data(), d);
      }
  });
}

Var bce_mean(Tape& t, Var scores) {
  const Tensor2& sv = t.value(scores);
  if (sv.rows() == 0 || sv.cols() == 0) throw ShapeError("bce_mean: empty score matrix");
  double total = 0.0;
  for (std::size_t b = 0; b < sv.rows(); ++b) {
    double l = -log_sigmoid(sv(b, 0));
    for (std::size_t j = 1; j < sv.cols(); ++j) l -= log_sigmoid(-sv(b, j));
    total += l;
  }
  const double inv_b = 1.0 / static_cast<double>(sv.rows());
  Tensor2 out(1, 1, total * inv_b);
  return t.record(std::move(out), t.requires_grad(scores), [scores, inv_b](Tape& tp, Var o) {
    const double g = tp.grad(o)(0, 0) * inv_b;
    const Tensor2& s = tp.value(scores);
    Tensor2& gs = tp.grad_buffer(scores);
    for (std::size_t b = 0; b < s.rows(); ++b) {
      gs(b, 0) += g * (sigmoid(s(b, 0)) - 1.0);
      for (std::size_t j = 1; j < s.cols(); ++j) gs(b, j) += g * sigmoid(s(b, j));
    }
  });
}

Var sum(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a).values()) s += v;
  return t.record(Tensor2(1, 1, s), t.requires_grad(a), [a](Tape& tp, Var o) {
    const double g = tp.grad(o)(0, 0);
    for (double& v : tp.grad_buffer(a).values()) v += g;
  });
}

}  // namespace ad
}  // namespace automlp::numkit
