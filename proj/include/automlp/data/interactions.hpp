#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace automlp::data {

// Bijection between opaque string ids and dense indices 1..size(). Index 0 is
// reserved for padding and never assigned.
class IdIndex {
 public:
  // Returns the existing index of `id` or assigns the next one.
  std::uint32_t intern(std::string_view id);
  std::uint32_t at(std::string_view id) const;  // LookupError when absent
  bool contains(std::string_view id) const { return map_.count(std::string(id)) != 0; }
  const std::string& id_of(std::uint32_t index) const;
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::unordered_map<std::string, std::uint32_t> map_;
  std::vector<std::string> ids_;
};

struct Event {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  std::int64_t timestamp = 0;
  // Dense categorical codes (1-based per feature column), empty without features.
  std::vector<std::uint32_t> features;
};

struct InteractionLog {
  std::vector<Event> events;
  IdIndex users;
  IdIndex items;
  // One code table per feature column.
  std::vector<IdIndex> feature_codes;

  std::size_t num_users() const noexcept { return users.size(); }
  std::size_t num_items() const noexcept { return items.size(); }
  std::size_t num_features() const noexcept { return feature_codes.size(); }
};

enum class Column { kUser, kItem, kTimestamp, kIgnore, kFeature };

struct LogFormat {
  std::string delimiter = "\t";
  std::vector<Column> columns{Column::kUser, Column::kItem, Column::kTimestamp};
  bool header = false;

  // UserID::MovieID::Rating::Timestamp
  static LogFormat movielens();
  // Comma-separated names: user, item, timestamp, rating (ignored), skip,
  // feature. Exactly one each of user, item and timestamp is required.
  static std::vector<Column> parse_columns(std::string_view spec);
};

InteractionLog parse_interactions(std::istream& in, const LogFormat& format);
// IoError naming the path when the file cannot be opened.
InteractionLog load_interactions(const std::filesystem::path& path, const LogFormat& format);

// Keeps users with at least `min_interactions` events. User and item indices
// are reassigned in first-appearance order over the surviving events.
InteractionLog filter_users(const InteractionLog& log, std::size_t min_interactions);

}  // namespace automlp::data
