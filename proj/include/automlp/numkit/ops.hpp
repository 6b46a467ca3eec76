#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "automlp/numkit/random.hpp"
#include "automlp/numkit/tensor.hpp"

namespace automlp::numkit {

inline constexpr double kLayerNormEps = 1e-5;

enum class Activation { kGelu, kRelu };

// Plain (non-recording) versions of the primitives. The tape in autodiff.hpp
// reuses these for its forward values.

Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// a * b^T
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b);
// a^T * b
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b);
Tensor2 transpose(const Tensor2& a);

// (x - mean) / sqrt(var + eps) * gamma + beta with population variance. A
// zero-variance input with eps == 0 maps to beta.
std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps = kLayerNormEps);

double gelu(double x);
double gelu_derivative(double x);
double activate(double x, Activation act);
double activate_derivative(double x, Activation act);

std::vector<double> softmax(std::span<const double> v);
// log(sigmoid(x)) without overflow.
double log_sigmoid(double x);
double sigmoid(double x);

// Inverted-dropout mask: entries are 0 or 1/(1-rate). An all-ones mask is
// returned when rate == 0 or when `training` is false.
Tensor2 dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng,
                     bool training = true);

}  // namespace automlp::numkit
