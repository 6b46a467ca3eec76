#include "automlp/data/synthetic.hpp"

#include <string>

#include "automlp/errors.hpp"

namespace automlp::data {

std::uint32_t planted_next(std::span<const std::uint32_t> history, std::size_t k_star,
                           std::size_t vocab) {
  if (history.size() < k_star || k_star == 0) {
    throw ArgumentError("planted_next: history shorter than the window");
  }
  const std::size_t t = history.size() - 1;
  const std::uint64_t sum =
      static_cast<std::uint64_t>(history[t]) + history[t + 1 - k_star];
  return static_cast<std::uint32_t>(sum % vocab + 1);
}

InteractionLog synthesize_log(const SynthConfig& cfg, numkit::Rng& rng) {
  if (cfg.k_star < 1 || cfg.k_star >= cfg.seq_len) {
    throw ArgumentError("k_star must satisfy 1 <= k_star < seq_len");
  }
  if (cfg.vocab < 4) throw ArgumentError("vocab must be at least 4");
  if (!(cfg.noise_rate >= 0.0 && cfg.noise_rate < 1.0)) {
    throw ArgumentError("noise_rate must lie in [0, 1)");
  }
  InteractionLog log;
  std::vector<std::uint32_t> seq;
  std::int64_t clock = 1'000'000;
  for (std::size_t u = 0; u < cfg.num_users; ++u) {
    seq.clear();
    for (std::size_t t = 0; t < cfg.seq_len; ++t) {
      std::uint32_t v;
      if (t < cfg.k_star) {
        v = static_cast<std::uint32_t>(rng.uniform_int(cfg.vocab) + 1);
      } else {
        v = planted_next(seq, cfg.k_star, cfg.vocab);
        if (cfg.noise_rate > 0.0 && rng.bernoulli(cfg.noise_rate)) {
          v = static_cast<std::uint32_t>(rng.uniform_int(cfg.vocab) + 1);
        }
      }
      seq.push_back(v);
    }
    const std::uint32_t user = log.users.intern("u" + std::to_string(u + 1));
    for (std::uint32_t v : seq) {
      Event ev;
      ev.user = user;
      ev.item = log.items.intern(std::to_string(v));
      ev.timestamp = ++clock;
      log.events.push_back(std::move(ev));
    }
  }
  return log;
}

}  // namespace automlp::data
