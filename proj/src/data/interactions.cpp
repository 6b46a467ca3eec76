#include "automlp/data/interactions.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "automlp/errors.hpp"

namespace automlp::data {

std::uint32_t IdIndex::intern(std::string_view id) {
  auto [it, inserted] =
      map_.try_emplace(std::string(id), static_cast<std::uint32_t>(ids_.size() + 1));
  if (inserted) ids_.emplace_back(id);
  return it->second;
}

std::uint32_t IdIndex::at(std::string_view id) const {
  const auto it = map_.find(std::string(id));
  if (it == map_.end()) throw LookupError("unknown id '" + std::string(id) + "'");
  return it->second;
}

const std::string& IdIndex::id_of(std::uint32_t index) const {
  if (index == 0 || index > ids_.size()) {
    throw LookupError("index " + std::to_string(index) + " out of range 1.." +
                      std::to_string(ids_.size()));
  }
  return ids_[index - 1];
}

LogFormat LogFormat::movielens() {
  LogFormat f;
  f.delimiter = "::";
  f.columns = {Column::kUser, Column::kItem, Column::kIgnore, Column::kTimestamp};
  return f;
}

std::vector<Column> LogFormat::parse_columns(std::string_view spec) {
  std::vector<Column> cols;
  int users = 0, items = 0, stamps = 0;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', pos), spec.size());
    std::string_view name = spec.substr(pos, end - pos);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (name == "user") {
      cols.push_back(Column::kUser);
      ++users;
    } else if (name == "item") {
      cols.push_back(Column::kItem);
      ++items;
    } else if (name == "timestamp") {
      cols.push_back(Column::kTimestamp);
      ++stamps;
    } else if (name == "rating" || name == "skip") {
      cols.push_back(Column::kIgnore);
    } else if (name == "feature") {
      cols.push_back(Column::kFeature);
    } else {
      throw ConfigError("unknown column name '" + std::string(name) + "'");
    }
    pos = end + 1;
  }
  if (users != 1 || items != 1 || stamps != 1) {
    throw ConfigError("column layout needs exactly one user, item and timestamp column: '" +
                      std::string(spec) + "'");
  }
  return cols;
}

namespace {

void split_fields(std::string_view line, std::string_view delim,
                  std::vector<std::string_view>& out) {
  out.clear();
  std::size_t pos = 0;
  for (;;) {
    const std::size_t hit = line.find(delim, pos);
    if (hit == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return;
    }
    out.push_back(line.substr(pos, hit - pos));
    pos = hit + delim.size();
  }
}

}  // namespace

InteractionLog parse_interactions(std::istream& in, const LogFormat& format) {
  if (format.delimiter.empty()) throw ConfigError("delimiter must not be empty");
  InteractionLog log;
  std::size_t num_features = 0;
  for (Column c : format.columns)
    if (c == Column::kFeature) ++num_features;
  log.feature_codes.resize(num_features);

  std::string line;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  bool skip_header = format.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (skip_header) {
      skip_header = false;
      continue;
    }
    split_fields(line, format.delimiter, fields);
    if (fields.size() != format.columns.size()) {
      throw ParseError("expected " + std::to_string(format.columns.size()) + " columns, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Event ev;
    std::size_t f = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view field = fields[c];
      switch (format.columns[c]) {
        case Column::kUser:
          if (field.empty()) throw ParseError("empty user id", line_no);
          ev.user = log.users.intern(field);
          break;
        case Column::kItem:
          if (field.empty()) throw ParseError("empty item id", line_no);
          ev.item = log.items.intern(field);
          break;
        case Column::kTimestamp: {
          const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                                 ev.timestamp);
          if (ec != std::errc() || ptr != field.data() + field.size()) {
            throw ParseError("timestamp '" + std::string(field) + "' is not an integer", line_no);
          }
          break;
        }
        case Column::kFeature:
          ev.features.push_back(log.feature_codes[f++].intern(field));
          break;
        case Column::kIgnore:
          break;
      }
    }
    log.events.push_back(std::move(ev));
  }
  return log;
}

InteractionLog load_interactions(const std::filesystem::path& path, const LogFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open interaction file '" + path.string() + "'");
  return parse_interactions(in, format);
}

InteractionLog filter_users(const InteractionLog& log, std::size_t min_interactions) {
  if (min_interactions < 1) throw ArgumentError("min_interactions must be at least 1");
  std::vector<std::size_t> counts(log.num_users() + 1, 0);
  for (const Event& e : log.events) ++counts[e.user];

  InteractionLog out;
  out.feature_codes = log.feature_codes;
  for (const Event& e : log.events) {
    if (counts[e.user] < min_interactions) continue;
    Event ev = e;
    ev.user = out.users.intern(log.users.id_of(e.user));
    ev.item = out.items.intern(log.items.id_of(e.item));
    out.events.push_back(std::move(ev));
  }
  return out;
}

}  // namespace automlp::data
