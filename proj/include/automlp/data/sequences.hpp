#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "automlp/data/interactions.hpp"

namespace automlp::data {

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

struct Example {
  std::uint32_t user = 0;
  // Exactly max_len item indices, left-padded with 0.
  std::vector<std::uint32_t> input;
  std::uint32_t target = 0;
  Split split = Split::kTrain;

  bool operator==(const Example&) const = default;
};

struct SequenceDataset {
  std::size_t max_len = 0;
  std::size_t num_items = 0;
  // histories[u - 1]: user u's chronological item indices.
  std::vector<std::vector<std::uint32_t>> histories;
  // Raw ids for item indices 1..num_items.
  std::vector<std::string> item_ids;
  // item_features[i]: feature codes of item i (row 0 is padding); empty
  // when the log carried no features.
  std::vector<std::vector<std::uint32_t>> item_features;
  // Number of distinct codes per feature column (codes are 1-based).
  std::vector<std::size_t> feature_cardinalities;

  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;

  std::size_t num_users() const noexcept { return histories.size(); }
  std::size_t num_features() const noexcept { return feature_cardinalities.size(); }
  const std::vector<Example>& examples(Split s) const;
  // Sorted, de-duplicated items the user interacted with.
  std::vector<std::uint32_t> interacted(std::uint32_t user) const;

  bool operator==(const SequenceDataset&) const = default;
};

// Orders each user's events by timestamp (file order on ties) and emits
// leave-one-out examples. Users with fewer than three events contribute none.
SequenceDataset build_sequences(const InteractionLog& log, std::size_t max_len);

// Left-padded window of the `max_len` items before position `end`.
std::vector<std::uint32_t> padded_window(std::span<const std::uint32_t> items, std::size_t end,
                                         std::size_t max_len);

// One example per line: "<split> <user> <target> <i_1> ... <i_T>".
std::string format_example(const Example& ex);
Example parse_example(std::string_view line, std::size_t line_no = 0);

void write_dataset(std::ostream& out, const SequenceDataset& ds);
SequenceDataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const SequenceDataset& ds);
SequenceDataset load_dataset(const std::filesystem::path& path);

}  // namespace automlp::data
