#include "automlp/data/sampling.hpp"

#include <algorithm>

#include "automlp/errors.hpp"

namespace automlp::data {

PopularityDist::PopularityDist(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) counts_.push_back(0);
  if (counts_[0] != 0) throw ArgumentError("padding item must have zero popularity");
  cumulative_.resize(counts_.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    acc += counts_[i];
    cumulative_[i] = acc;
  }
  total_ = acc;
  support_ = static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(), [](std::uint64_t c) { return c > 0; }));
}

PopularityDist PopularityDist::from_dataset(const SequenceDataset& ds) {
  std::vector<std::uint64_t> counts(ds.num_items + 1, 0);
  for (const auto& h : ds.histories)
    for (auto item : h) ++counts.at(item);
  return PopularityDist(std::move(counts));
}

double PopularityDist::probability(std::uint32_t item) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(item)) / static_cast<double>(total_);
}

std::uint32_t PopularityDist::draw(numkit::Rng& rng) const {
  if (total_ == 0) throw SamplingError("popularity distribution is empty", 0);
  const std::uint64_t r = rng.uniform_int(total_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return static_cast<std::uint32_t>(it - cumulative_.begin());
}

namespace {

bool contains_sorted(std::span<const std::uint32_t> v, std::uint32_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

// Sequential weighted draws over an explicit candidate list; used when
// rejection against the full table would be slow.
void draw_from_pool(std::vector<std::pair<std::uint32_t, std::uint64_t>> pool, std::size_t n,
                    numkit::Rng& rng, std::vector<std::uint32_t>& out) {
  std::uint64_t total = 0;
  for (const auto& p : pool) total += p.second;
  while (out.size() < n) {
    std::uint64_t r = rng.uniform_int(total);
    std::size_t j = 0;
    while (r >= pool[j].second) r -= pool[j++].second;
    out.push_back(pool[j].first);
    total -= pool[j].second;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace

std::vector<std::uint32_t> sample_negatives(const PopularityDist& dist,
                                            std::span<const std::uint32_t> exclude, std::size_t n,
                                            numkit::Rng& rng, Replacement mode) {
  if (!std::is_sorted(exclude.begin(), exclude.end())) {
    throw ArgumentError("sample_negatives: exclusion list must be sorted");
  }
  std::size_t pool_size = dist.support_size();
  std::uint64_t pool_mass = dist.total();
  std::uint32_t previous = 0;
  for (std::uint32_t item : exclude) {
    if (item == previous || item == 0 || item > dist.num_items()) continue;
    previous = item;
    if (dist.count(item) > 0) {
      --pool_size;
      pool_mass -= dist.count(item);
    }
  }
  std::vector<std::uint32_t> out;
  if (n == 0) return out;
  const bool distinct = mode == Replacement::kWithout;
  if (pool_size == 0 || (distinct && pool_size < n)) {
    throw SamplingError("cannot draw " + std::to_string(n) + (distinct ? " distinct" : "") +
                            " negatives from a pool of " + std::to_string(pool_size) + " items",
                        pool_size);
  }
  out.reserve(n);

  // Rejection against the full table is exact: conditioned on acceptance each
  // draw is proportional to popularity over the remaining eligible items.
  const bool rejection_ok = pool_mass * 4 >= dist.total();
  std::vector<std::uint32_t> chosen;  // sorted copy of `out` for distinct mode
  std::size_t budget = 64 * n + 256;
  while (out.size() < n && rejection_ok && budget-- > 0) {
    const std::uint32_t item = dist.draw(rng);
    if (contains_sorted(exclude, item)) continue;
    if (distinct) {
      const auto pos = std::lower_bound(chosen.begin(), chosen.end(), item);
      if (pos != chosen.end() && *pos == item) continue;
      chosen.insert(pos, item);
    }
    out.push_back(item);
  }
  if (out.size() == n) return out;

  std::vector<std::pair<std::uint32_t, std::uint64_t>> pool;
  for (std::uint32_t i = 1; i <= dist.num_items(); ++i) {
    if (dist.count(i) == 0 || contains_sorted(exclude, i)) continue;
    if (distinct && std::binary_search(chosen.begin(), chosen.end(), i)) continue;
    pool.emplace_back(i, dist.count(i));
  }
  if (distinct) {
    draw_from_pool(std::move(pool), n, rng, out);
  } else {
    std::uint64_t total = 0;
    for (const auto& p : pool) total += p.second;
    while (out.size() < n) {
      std::uint64_t r = rng.uniform_int(total);
      std::size_t j = 0;
      while (r >= pool[j].second) r -= pool[j++].second;
      out.push_back(pool[j].first);
    }
  }
  return out;
}

}  // namespace automlp::data
