#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "automlp/numkit/autodiff.hpp"

namespace automlp::numkit {

// Builds a scalar (1x1) loss on `tape` from the leaves bound to the checked
// parameters, in the order they were passed to grad_check.
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> leaves)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// |a - b| / max(|a|, |b|, floor)
double relative_error(double a, double b, double floor = 1e-8);

// Compares tape gradients with central differences (f(x+h) - f(x-h)) / 2h
// for every entry of every parameter. Parameters are perturbed in place and
// restored before returning. Throws NumericalError if the loss is not finite.
GradCheckReport grad_check(const LossBuilder& f, std::span<Tensor2* const> params,
                           double h = 1e-5);

}  // namespace automlp::numkit
