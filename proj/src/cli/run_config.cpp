#include "automlp/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "automlp/errors.hpp"

namespace automlp::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::size_t> to_counts(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(to_count(key, trim(part)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

void check_value(const KeySpec& spec, const std::string& v) {
  switch (spec.kind) {
    case KeyKind::kCount: to_count(spec.key, v); break;
    case KeyKind::kReal: to_real(spec.key, v); break;
    case KeyKind::kBool: to_bool(spec.key, v); break;
    case KeyKind::kList: to_counts(spec.key, v); break;
    case KeyKind::kString: break;
  }
}

data::Replacement to_replacement(const std::string& key, const std::string& v) {
  if (v == "without") return data::Replacement::kWithout;
  if (v == "with") return data::Replacement::kWith;
  throw ConfigError(key + ": expected 'without' or 'with', got '" + v + "'");
}

}  // namespace

const std::vector<KeySpec>& key_specs() {
  using K = KeyKind;
  static const std::vector<KeySpec> specs = {
      // run
      {"out", "run", K::kString, "output directory"},
      {"seed", "0", K::kCount, "seed for every random stream"},
      {"dataset", "", K::kString, "dataset file (default <out>/dataset.txt)"},
      {"search-result", "", K::kString, "search result (default <out>/search_result.json)"},
      {"checkpoint", "", K::kString, "model checkpoint (default <out>/model.ckpt)"},
      // ingest
      {"input", "", K::kString, "raw interaction log"},
      {"format", "movielens", K::kString, "movielens or columns"},
      {"columns", "user,item,timestamp", K::kString, "column layout when format=columns"},
      {"delimiter", "\\t", K::kString, "field delimiter when format=columns"},
      {"header", "false", K::kBool, "skip the first line"},
      {"min-interactions", "10", K::kCount, "drop users with fewer events"},
      // synth
      {"users", "200", K::kCount, "synthetic users"},
      {"len", "30", K::kCount, "synthetic events per user"},
      {"vocab", "50", K::kCount, "synthetic item vocabulary"},
      {"kstar", "2", K::kCount, "planted dependency length"},
      {"noise", "0", K::kReal, "probability of a uniform replacement item"},
      // model
      {"T", "50", K::kCount, "maximum sequence length"},
      {"D", "128", K::kCount, "embedding size"},
      {"Rs", "512", K::kCount, "sequence-mixer hidden size"},
      {"Rc", "512", K::kCount, "channel-mixer hidden size"},
      {"L", "4", K::kCount, "mixer layers per stack"},
      {"K", "1,2,4,8,16", K::kList, "candidate short-term lengths"},
      {"activation", "gelu", K::kString, "gelu or relu"},
      {"norm-axis", "channel", K::kString, "channel or sequence"},
      {"disable-sequence-mixer", "false", K::kBool, "replace sequence mixers by identity"},
      {"disable-channel-mixer", "false", K::kBool, "replace channel mixers by identity"},
      // train
      {"lr", "0.001", K::kReal, "learning rate (also the look-ahead step)"},
      {"beta1", "0.9", K::kReal, "Adam beta1"},
      {"beta2", "0.999", K::kReal, "Adam beta2"},
      {"eps-adam", "1e-08", K::kReal, "Adam epsilon"},
      {"weight-decay", "0", K::kReal, "L2 penalty"},
      {"batch-size", "256", K::kCount, "examples per mini-batch"},
      {"max-epochs", "200", K::kCount, "epoch limit for training and search"},
      {"patience", "10", K::kCount, "early-stopping patience in epochs"},
      {"negatives", "1", K::kCount, "training negatives per positive"},
      {"negative-sampling", "without", K::kString, "without or with replacement"},
      {"resample-negatives", "true", K::kBool, "fresh training negatives every epoch"},
      {"dropout", "0.5", K::kReal, "dropout after mixer activations"},
      {"k", "0", K::kCount, "fixed short-term length (0: take it from the search result)"},
      // eval
      {"eval-negatives", "100", K::kCount, "negatives per ranked target"},
      {"cutoff", "10", K::kCount, "metric cutoff N"},
      {"eval-sampling", "without", K::kString, "without or with replacement"},
      // search
      {"arch-lr", "0.003", K::kReal, "Adam step for architecture weights"},
      {"mode", "first_order", K::kString, "first_order or one_step_unrolled"},
      {"warm-start", "false", K::kBool, "retrain from the searched weights"},
      // sweep / bench
      {"sweep-L", "4,8,12", K::kList, "layer counts for sweep"},
      {"sweep-D", "32,64,128", K::kList, "embedding sizes for sweep"},
      {"bench-T", "64,128,256,512", K::kList, "sequence lengths for bench"},
      {"bench-reps", "50", K::kCount, "timed repetitions per length"},
      {"bench-batch", "16", K::kCount, "sequences per timed forward pass"},
  };
  return specs;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& s : key_specs())
    if (s.key == key) return &s;
  return nullptr;
}

std::map<std::string, std::string> parse_config_text(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    for (char& c : key)
      if (c == '_') c = '-';
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
    const std::string value = trim(t.substr(eq + 1));
    check_value(*spec, value);
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_config_text(in, path.string());
}

RunConfig RunConfig::resolve(const std::map<std::string, std::string>& file,
                             const std::map<std::string, std::string>& flags) {
  RunConfig rc;
  for (const auto& s : key_specs()) rc.values_[s.key] = s.default_value;
  for (const auto* layer : {&file, &flags}) {
    for (const auto& [k, v] : *layer) rc.set(k, v);
  }
  return rc;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ConfigError("unknown key '" + key + "'");
  check_value(*spec, value);
  values_[key] = value;
}

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

std::size_t RunConfig::count(const std::string& key) const { return to_count(key, str(key)); }
double RunConfig::real(const std::string& key) const { return to_real(key, str(key)); }
bool RunConfig::flag(const std::string& key) const { return to_bool(key, str(key)); }
std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
  return to_counts(key, str(key));
}
std::uint64_t RunConfig::seed() const { return count("seed"); }

std::filesystem::path RunConfig::out_dir() const { return str("out"); }

std::filesystem::path RunConfig::path_or(const std::string& key, const std::string& file_name) const {
  const std::string& v = str(key);
  return v.empty() ? out_dir() / file_name : std::filesystem::path(v);
}

data::LogFormat RunConfig::log_format() const {
  const std::string& fmt = str("format");
  if (fmt == "movielens") {
    auto f = data::LogFormat::movielens();
    f.header = flag("header");
    return f;
  }
  if (fmt != "columns") throw ConfigError("format: expected movielens or columns, got '" + fmt + "'");
  data::LogFormat f;
  std::string d = str("delimiter");
  if (d == "\\t" || d == "tab") d = "\t";
  if (d == "space") d = " ";
  if (d.empty()) throw ConfigError("delimiter must not be empty");
  f.delimiter = d;
  f.columns = data::LogFormat::parse_columns(str("columns"));
  f.header = flag("header");
  return f;
}

data::SynthConfig RunConfig::synth_config() const {
  data::SynthConfig s;
  s.num_users = count("users");
  s.seq_len = count("len");
  s.vocab = count("vocab");
  s.k_star = count("kstar");
  s.noise_rate = real("noise");
  return s;
}

model::ModelConfig RunConfig::model_config(std::size_t num_items,
                                           std::vector<std::size_t> feature_cardinalities) const {
  model::ModelConfig c;
  c.max_len = count("T");
  c.dim = count("D");
  c.seq_hidden = count("Rs");
  c.channel_hidden = count("Rc");
  c.layers = count("L");
  c.candidates = counts("K");
  c.activation = model::parse_activation(str("activation"));
  c.norm_axis = model::parse_norm_axis(str("norm-axis"));
  c.disable_sequence_mixer = flag("disable-sequence-mixer");
  c.disable_channel_mixer = flag("disable-channel-mixer");
  c.num_items = num_items;
  c.feature_cardinalities = std::move(feature_cardinalities);
  c.validate();
  return c;
}

eval::EvalConfig RunConfig::eval_config() const {
  eval::EvalConfig e;
  e.num_negatives = count("eval-negatives");
  e.cutoff = count("cutoff");
  e.seed = seed();
  e.sampling = to_replacement("eval-sampling", str("eval-sampling"));
  return e;
}

train::TrainConfig RunConfig::train_config() const {
  train::TrainConfig t;
  t.learning_rate = real("lr");
  t.beta1 = real("beta1");
  t.beta2 = real("beta2");
  t.eps_adam = real("eps-adam");
  t.weight_decay = real("weight-decay");
  t.batch_size = count("batch-size");
  t.max_epochs = count("max-epochs");
  t.patience = count("patience");
  t.negatives_per_positive = count("negatives");
  t.negative_sampling = to_replacement("negative-sampling", str("negative-sampling"));
  t.resample_negatives = flag("resample-negatives");
  t.dropout = real("dropout");
  t.seed = seed();
  t.validation = eval_config();
  t.validate();
  return t;
}

search::SearchConfig RunConfig::search_config() const {
  search::SearchConfig s;
  s.candidates = counts("K");
  s.arch_lr = real("arch-lr");
  s.mode = search::parse_mode(str("mode"));
  s.train = train_config();
  s.warm_start = flag("warm-start");
  s.validate(count("T"));
  return s;
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace automlp::cli
