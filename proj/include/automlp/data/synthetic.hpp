#pragma once

#include <cstdint>
#include <span>

#include "automlp/data/interactions.hpp"
#include "automlp/numkit/random.hpp"

namespace automlp::data {

struct SynthConfig {
  std::size_t num_users = 200;
  std::size_t seq_len = 30;
  std::size_t vocab = 50;
  std::size_t k_star = 2;
  double noise_rate = 0.0;
};

// Planted next-item rule on item values 1..vocab:
//   next = ((v[t] + v[t - k_star + 1]) mod vocab) + 1
// Each user's first k_star items are uniform; every later item follows the
// rule except that with probability noise_rate it is replaced by a uniform
// draw. Item ids are the decimal values, user ids are "u<n>", and per-user
// timestamps increase strictly.
InteractionLog synthesize_log(const SynthConfig& cfg, numkit::Rng& rng);

// The value the rule predicts after `history` (item values, not indices).
std::uint32_t planted_next(std::span<const std::uint32_t> history, std::size_t k_star,
                           std::size_t vocab);

}  // namespace automlp::data
