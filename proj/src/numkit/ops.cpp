#include "automlp/numkit/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "automlp/errors.hpp"
#include "automlp/numkit/kernels.hpp"

namespace automlp::numkit {

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + a.shape_string() + " by " + b.shape_string());
  }
  Tensor2 c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: cannot multiply " + a.shape_string() + " by transpose of " +
                     b.shape_string());
  }
  Tensor2 c(a.rows(), b.rows());
  kernels::active().gemm_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
  return c;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: cannot multiply transpose of " + a.shape_string() + " by " +
                     b.shape_string());
  }
  Tensor2 c(a.cols(), b.cols());
  kernels::active().gemm_tn(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
  return c;
}

Tensor2 transpose(const Tensor2& a) {
  Tensor2 t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps) {
  if (gamma.size() != x.size() || beta.size() != x.size()) {
    throw ShapeError("layer_norm: length mismatch (x " + std::to_string(x.size()) + ", gamma " +
                     std::to_string(gamma.size()) + ", beta " + std::to_string(beta.size()) +
                     ")");
  }
  if (eps < 0.0) throw ArgumentError("layer_norm: eps must be non-negative");
  const std::size_t n = x.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double denom = var + eps;
  const double inv = denom > 0.0 ? 1.0 / std::sqrt(denom) : 0.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mean) * inv * gamma[i] + beta[i];
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  const double pdf = std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

double activate(double x, Activation act) {
  return act == Activation::kGelu ? gelu(x) : (x > 0.0 ? x : 0.0);
}

double activate_derivative(double x, Activation act) {
  return act == Activation::kGelu ? gelu_derivative(x) : (x > 0.0 ? 1.0 : 0.0);
}

std::vector<double> softmax(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("softmax: empty input");
  const double mx = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& o : out) o /= sum;
  return out;
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor2 dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ArgumentError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  Tensor2 mask(rows, cols, 1.0);
  if (!training || rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  // Each 64-bit draw yields two 32-bit uniforms.
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(rate, 32));
  auto values = mask.values();
  for (std::size_t i = 0; i < values.size(); i += 2) {
    const std::uint64_t r = rng.next_u64();
    values[i] = (r & 0xffffffffu) < threshold ? 0.0 : keep_scale;
    if (i + 1 < values.size()) values[i + 1] = (r >> 32) < threshold ? 0.0 : keep_scale;
  }
  return mask;
}

}  // namespace automlp::numkit
