#include "automlp/numkit/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "automlp/errors.hpp"

namespace automlp::numkit {
namespace {

double evaluate(const LossBuilder& f, std::span<Tensor2* const> params) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (Tensor2* p : params) leaves.push_back(tape.leaf(*p));
  const double v = tape.value(f(tape, leaves))(0, 0);
  if (!std::isfinite(v)) throw NumericalError("grad_check: loss is not finite");
  return v;
}

}  // namespace

double relative_error(double a, double b, double floor) {
  const double denom = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / denom;
}

GradCheckReport grad_check(const LossBuilder& f, std::span<Tensor2* const> params, double h) {
  if (!(h > 0.0)) throw ArgumentError("grad_check: step must be positive");

  std::vector<Tensor2> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (Tensor2* p : params) leaves.push_back(tape.leaf(*p));
    const Var loss = f(tape, leaves);
    if (!std::isfinite(tape.value(loss)(0, 0))) {
      throw NumericalError("grad_check: loss is not finite");
    }
    tape.backward(loss);
    for (Var v : leaves) analytic.push_back(tape.grad(v));
  }

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor2& p = *params[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double up = evaluate(f, params);
      p[i] = saved - h;
      const double down = evaluate(f, params);
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[pi][i], numeric);
      ++report.checked;
      if (err > report.max_rel_error || report.checked == 1) {
        report.max_rel_error = err;
        report.worst_param = pi;
        report.worst_index = i;
        report.worst_analytic = analytic[pi][i];
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace automlp::numkit
