#include "automlp/data/sequences.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "automlp/errors.hpp"

namespace automlp::data {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ArgumentError("unknown split '" + std::string(name) + "'");
}

const std::vector<Example>& SequenceDataset::examples(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kVal:
      return val;
    case Split::kTest:
      return test;
  }
  throw ArgumentError("unknown split");
}

std::vector<std::uint32_t> SequenceDataset::interacted(std::uint32_t user) const {
  if (user == 0 || user > histories.size()) {
    throw LookupError("user index " + std::to_string(user) + " out of range");
  }
  std::vector<std::uint32_t> items = histories[user - 1];
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::vector<std::uint32_t> padded_window(std::span<const std::uint32_t> items, std::size_t end,
                                         std::size_t max_len) {
  std::vector<std::uint32_t> window(max_len, 0);
  const std::size_t take = std::min(end, max_len);
  std::copy(items.begin() + static_cast<std::ptrdiff_t>(end - take),
            items.begin() + static_cast<std::ptrdiff_t>(end),
            window.begin() + static_cast<std::ptrdiff_t>(max_len - take));
  return window;
}

SequenceDataset build_sequences(const InteractionLog& log, std::size_t max_len) {
  if (max_len < 2) throw ArgumentError("max_len must be at least 2, got " + std::to_string(max_len));
  SequenceDataset ds;
  ds.max_len = max_len;
  ds.num_items = log.num_items();
  ds.item_ids = log.items.ids();

  std::vector<std::vector<std::size_t>> per_user(log.num_users());
  for (std::size_t i = 0; i < log.events.size(); ++i) per_user[log.events[i].user - 1].push_back(i);

  ds.histories.resize(log.num_users());
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    auto& idx = per_user[u];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return log.events[a].timestamp < log.events[b].timestamp;
    });
    auto& hist = ds.histories[u];
    hist.reserve(idx.size());
    for (std::size_t i : idx) hist.push_back(log.events[i].item);

    const std::size_t n = hist.size();
    if (n < 3) continue;
    const auto user = static_cast<std::uint32_t>(u + 1);
    for (std::size_t t = 1; t + 2 < n; ++t) {
      ds.train.push_back({user, padded_window(hist, t, max_len), hist[t], Split::kTrain});
    }
    ds.val.push_back({user, padded_window(hist, n - 2, max_len), hist[n - 2], Split::kVal});
    ds.test.push_back({user, padded_window(hist, n - 1, max_len), hist[n - 1], Split::kTest});
  }

  if (log.num_features() > 0) {
    for (const IdIndex& codes : log.feature_codes) ds.feature_cardinalities.push_back(codes.size());
    ds.item_features.assign(ds.num_items + 1, std::vector<std::uint32_t>(log.num_features(), 0));
    std::vector<bool> seen(ds.num_items + 1, false);
    for (const Event& e : log.events) {
      if (seen[e.item]) continue;
      seen[e.item] = true;
      ds.item_features[e.item] = e.features;
    }
  }
  return ds;
}

// ---- text serialization ----------------------------------------------------

namespace {

constexpr std::string_view kDatasetMagic = "automlp-dataset";
constexpr int kDatasetVersion = 1;

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line_no);
  }
  return value;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    const std::size_t end = std::min(line.find(' ', pos), line.size());
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::vector<std::uint32_t> parse_indices(std::span<const std::string_view> toks,
                                         std::size_t line_no) {
  std::vector<std::uint32_t> out;
  out.reserve(toks.size());
  for (auto t : toks) out.push_back(parse_number<std::uint32_t>(t, line_no, "index"));
  return out;
}

void write_indices(std::ostream& out, std::span<const std::uint32_t> v) {
  for (auto x : v) out << ' ' << x;
}

}  // namespace

std::string format_example(const Example& ex) {
  std::ostringstream os;
  os << split_name(ex.split) << ' ' << ex.user << ' ' << ex.target;
  write_indices(os, ex.input);
  return os.str();
}

Example parse_example(std::string_view line, std::size_t line_no) {
  const auto toks = tokens(line);
  if (toks.size() < 3) throw ParseError("example needs split, user and target", line_no);
  Example ex;
  ex.split = parse_split(toks[0]);
  ex.user = parse_number<std::uint32_t>(toks[1], line_no, "user");
  ex.target = parse_number<std::uint32_t>(toks[2], line_no, "target");
  ex.input = parse_indices(std::span(toks).subspan(3), line_no);
  return ex;
}

void write_dataset(std::ostream& out, const SequenceDataset& ds) {
  out << kDatasetMagic << ' ' << kDatasetVersion << '\n';
  out << "max_len " << ds.max_len << '\n';
  out << "num_items " << ds.num_items << '\n';
  out << "features";
  for (auto c : ds.feature_cardinalities) out << ' ' << c;
  out << '\n';
  for (std::size_t i = 0; i < ds.item_ids.size(); ++i) {
    if (ds.item_ids[i].find_first_of(" \t\r\n") != std::string::npos) {
      throw DataError("item id '" + ds.item_ids[i] + "' contains whitespace");
    }
    out << "item " << (i + 1) << ' ' << ds.item_ids[i];
    if (!ds.item_features.empty()) write_indices(out, ds.item_features[i + 1]);
    out << '\n';
  }
  out << "users " << ds.histories.size() << '\n';
  for (std::size_t u = 0; u < ds.histories.size(); ++u) {
    out << "history " << (u + 1);
    write_indices(out, ds.histories[u]);
    out << '\n';
  }
  for (const auto* split : {&ds.train, &ds.val, &ds.test})
    for (const Example& ex : *split) out << "example " << format_example(ex) << '\n';
}

SequenceDataset read_dataset(std::istream& in) {
  SequenceDataset ds;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::vector<std::string_view> {
    if (!std::getline(in, line)) throw ParseError("unexpected end of dataset", line_no + 1);
    ++line_no;
    return tokens(line);
  };
  auto expect = [&](const std::vector<std::string_view>& t, std::string_view key, std::size_t n) {
    if (t.empty() || t[0] != key || (n != 0 && t.size() != n)) {
      throw ParseError("expected '" + std::string(key) + "' record", line_no);
    }
  };

  auto t = next();
  if (t.size() != 2 || t[0] != kDatasetMagic) throw ParseError("not a dataset file", line_no);
  if (parse_number<int>(t[1], line_no, "version") != kDatasetVersion) {
    throw ParseError("unsupported dataset version " + std::string(t[1]), line_no);
  }
  t = next();
  expect(t, "max_len", 2);
  ds.max_len = parse_number<std::size_t>(t[1], line_no, "max_len");
  t = next();
  expect(t, "num_items", 2);
  ds.num_items = parse_number<std::size_t>(t[1], line_no, "num_items");
  t = next();
  expect(t, "features", 0);
  for (std::size_t i = 1; i < t.size(); ++i)
    ds.feature_cardinalities.push_back(parse_number<std::size_t>(t[i], line_no, "cardinality"));
  const std::size_t nf = ds.feature_cardinalities.size();
  if (nf > 0) ds.item_features.assign(ds.num_items + 1, std::vector<std::uint32_t>(nf, 0));
  for (std::size_t i = 1; i <= ds.num_items; ++i) {
    t = next();
    expect(t, "item", 3 + nf);
    if (parse_number<std::size_t>(t[1], line_no, "item index") != i) {
      throw ParseError("item records out of order", line_no);
    }
    ds.item_ids.emplace_back(t[2]);
    if (nf > 0) ds.item_features[i] = parse_indices(std::span(t).subspan(3), line_no);
  }
  t = next();
  expect(t, "users", 2);
  const auto users = parse_number<std::size_t>(t[1], line_no, "user count");
  ds.histories.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    t = next();
    expect(t, "history", 0);
    if (t.size() < 2 || parse_number<std::size_t>(t[1], line_no, "user") != u + 1) {
      throw ParseError("history records out of order", line_no);
    }
    ds.histories[u] = parse_indices(std::span(t).subspan(2), line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("example ", 0) != 0) throw ParseError("expected 'example' record", line_no);
    Example ex = parse_example(std::string_view(line).substr(8), line_no);
    if (ex.input.size() != ds.max_len) {
      throw ParseError("example window length " + std::to_string(ex.input.size()) +
                           " differs from max_len " + std::to_string(ds.max_len),
                       line_no);
    }
    switch (ex.split) {
      case Split::kTrain:
        ds.train.push_back(std::move(ex));
        break;
      case Split::kVal:
        ds.val.push_back(std::move(ex));
        break;
      case Split::kTest:
        ds.test.push_back(std::move(ex));
        break;
    }
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const SequenceDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file '" + path.string() + "'");
  write_dataset(out, ds);
  if (!out) throw IoError("failed writing dataset file '" + path.string() + "'");
}

SequenceDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");
  return read_dataset(in);
}

}  // namespace automlp::data
