#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "automlp/data/sequences.hpp"
#include "automlp/numkit/random.hpp"

namespace automlp::data {

// Item-popularity distribution over indices 1..num_items.
class PopularityDist {
 public:
  PopularityDist() = default;
  // counts[0] is the padding slot and must be zero.
  explicit PopularityDist(std::vector<std::uint64_t> counts);
  static PopularityDist from_dataset(const SequenceDataset& ds);

  std::size_t num_items() const noexcept { return counts_.empty() ? 0 : counts_.size() - 1; }
  std::uint64_t count(std::uint32_t item) const { return counts_.at(item); }
  std::uint64_t total() const noexcept { return total_; }
  // Number of items with a positive count.
  std::size_t support_size() const noexcept { return support_; }
  double probability(std::uint32_t item) const;
  // Item whose cumulative interval contains u * total, u in [0, 1).
  std::uint32_t draw(numkit::Rng& rng) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
  std::size_t support_ = 0;
};

enum class Replacement { kWithout, kWith };

// Draws n items, excluding `exclude` (sorted ascending) and index 0, with
// probability proportional to popularity among the remaining items. The
// default draws n distinct items and throws SamplingError naming the pool
// size when fewer than n are eligible; Replacement::kWith allows repeats and
// only requires a non-empty pool.
std::vector<std::uint32_t> sample_negatives(const PopularityDist& dist,
                                            std::span<const std::uint32_t> exclude, std::size_t n,
                                            numkit::Rng& rng,
                                            Replacement mode = Replacement::kWithout);

}  // namespace automlp::data
