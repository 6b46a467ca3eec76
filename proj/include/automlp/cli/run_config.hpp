#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "automlp/data/interactions.hpp"
#include "automlp/data/synthetic.hpp"
#include "automlp/eval/metrics.hpp"
#include "automlp/model/config.hpp"
#include "automlp/search/search.hpp"
#include "automlp/train/fit.hpp"

namespace automlp::cli {

enum class KeyKind { kString, kCount, kReal, kBool, kList };

struct KeySpec {
  std::string key;
  std::string default_value;
  KeyKind kind;
  std::string help;
};

// Every recognised configuration key with its built-in default.
const std::vector<KeySpec>& key_specs();
const KeySpec* find_key(const std::string& key);

// "key = value" lines; '#' starts a comment, blank lines are skipped.
// Unknown keys and malformed lines raise ConfigError.
std::map<std::string, std::string> parse_config_text(std::istream& in, const std::string& origin);
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

// Fully resolved key/value configuration of one run.
class RunConfig {
 public:
  // defaults, overridden by `file`, overridden by `flags`.
  static RunConfig resolve(const std::map<std::string, std::string>& file,
                           const std::map<std::string, std::string>& flags);

  const std::string& str(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;
  std::uint64_t seed() const;
  void set(const std::string& key, const std::string& value);

  std::filesystem::path out_dir() const;
  // Path-valued keys fall back to a file inside the output directory.
  std::filesystem::path path_or(const std::string& key, const std::string& file_name) const;

  data::LogFormat log_format() const;
  data::SynthConfig synth_config() const;
  model::ModelConfig model_config(std::size_t num_items,
                                  std::vector<std::size_t> feature_cardinalities = {}) const;
  train::TrainConfig train_config() const;
  eval::EvalConfig eval_config() const;
  search::SearchConfig search_config() const;

  // Sorted "key = value" lines, readable back by parse_config_text.
  std::string serialize() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace automlp::cli
