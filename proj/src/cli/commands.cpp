#include "automlp/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "automlp/cli/exit_codes.hpp"
#include "automlp/data/synthetic.hpp"
#include "automlp/errors.hpp"
#include "automlp/model/checkpoint.hpp"
#include "automlp/model/forward.hpp"

namespace automlp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  return kExitFailure;
}

namespace {

class JsonLines {
 public:
  explicit JsonLines(const fs::path& path) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
  }
  void write(const json& j) {
    out_ << j.dump() << "\n";
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void prepare(const std::string& command, const RunConfig& rc) {
  std::error_code ec;
  fs::create_directories(rc.out_dir(), ec);
  if (ec) throw IoError("cannot create output directory '" + rc.out_dir().string() + "'");
  write_text(rc.out_dir() / (command + "_config.txt"), rc.serialize());
}

data::SequenceDataset load_ds(const RunConfig& rc) {
  auto ds = data::load_dataset(rc.path_or("dataset", "dataset.txt"));
  if (ds.max_len != rc.count("T")) {
    throw ConfigError("dataset was built with T=" + std::to_string(ds.max_len) +
                      " but the run asks for T=" + rc.str("T"));
  }
  return ds;
}

model::ModelConfig model_for(const RunConfig& rc, const data::SequenceDataset& ds) {
  return rc.model_config(ds.num_items, ds.feature_cardinalities);
}

json dataset_summary(const data::SequenceDataset& ds) {
  return {{"users", ds.histories.size()}, {"items", ds.num_items}, {"train", ds.train.size()},
          {"val", ds.val.size()},         {"test", ds.test.size()}, {"T", ds.max_len}};
}

void finish_dataset(const RunConfig& rc, const data::InteractionLog& raw, json summary,
                    std::ostream& out) {
  const auto log = data::filter_users(raw, rc.count("min-interactions"));
  const auto ds = data::build_sequences(log, rc.count("T"));
  data::save_dataset(rc.out_dir() / "dataset.txt", ds);
  summary["raw_interactions"] = raw.events.size();
  summary["raw_users"] = raw.num_users();
  summary["raw_items"] = raw.num_items();
  summary["interactions"] = log.events.size();
  summary["dataset"] = dataset_summary(ds);
  write_json(rc.out_dir() / "dataset_summary.json", summary);
  out << summary.dump() << "\n";
}

void cmd_ingest(const RunConfig& rc, std::ostream& out) {
  if (rc.str("input").empty()) throw ConfigError("ingest needs --input <log file>");
  const auto raw = data::load_interactions(rc.str("input"), rc.log_format());
  finish_dataset(rc, raw, {{"source", rc.str("input")}}, out);
}

void cmd_synth(const RunConfig& rc, std::ostream& out) {
  numkit::Rng rng(rc.seed());
  const auto raw = data::synthesize_log(rc.synth_config(), rng);
  finish_dataset(rc, raw, {{"source", "synthetic"}}, out);
}

void cmd_search(const RunConfig& rc, std::ostream& out) {
  const auto ds = load_ds(rc);
  const auto mc = model_for(rc, ds);
  const auto sc = rc.search_config();
  JsonLines trace(rc.out_dir() / "search_trace.jsonl");
  const auto result = search::run_search(
      ds, mc, sc, [&](const search::SearchEpochRecord& r) { trace.write(search::search_record_json(r)); });
  json j = search::result_json(result);
  j["mode"] = search::mode_name(sc.mode);
  write_json(rc.out_dir() / "search_result.json", j);
  model::save_checkpoint(rc.out_dir() / "search_model.ckpt",
                         {result.searched.config, result.searched.params, result.searched.arch,
                          {{"phase", "search"}}});
  out << json{{"selected_k", result.selected_k}, {"alpha", result.alpha}, {"epochs", result.epochs}}.dump()
      << "\n";
}

std::size_t resolve_k(const RunConfig& rc) {
  if (rc.count("k") != 0) return rc.count("k");
  const fs::path p = rc.path_or("search-result", "search_result.json");
  if (!fs::exists(p)) {
    throw IoError("no --k given and no search result at '" + p.string() + "'");
  }
  return search::result_from_json(read_json(p)).selected_k;
}

struct TrainedRun {
  train::FitResult fit;
  std::size_t k = 0;
};

TrainedRun train_with(const RunConfig& rc, const data::SequenceDataset& ds, std::size_t k,
                      JsonLines* trace) {
  const auto mc = model_for(rc, ds);
  const auto sc = rc.search_config();
  search::SearchResult prior;
  if (sc.warm_start) {
    const fs::path p = rc.path_or("search-result", "search_result.json").parent_path() / "search_model.ckpt";
    auto ckpt = model::load_checkpoint(p);
    prior.searched = {ckpt.config, std::move(ckpt.params), std::move(ckpt.arch)};
  }
  model::Model init = search::retrain_init(prior, mc, k, sc);
  train::FitHooks hooks;
  if (trace != nullptr) {
    hooks.on_epoch = [&](const train::EpochRecord& r) { trace->write(train::epoch_record_json(r)); };
  }
  return {train::fit(ds, std::move(init), sc.train, hooks), k};
}

json test_metrics(const RunConfig& rc, const model::Model& m, const data::SequenceDataset& ds) {
  const auto pop = data::PopularityDist::from_dataset(ds);
  const auto ec = rc.eval_config();
  return eval::metrics_record(eval::evaluate_split(m, ds, data::Split::kTest, pop, ec),
                              data::Split::kTest, ec.seed);
}

void cmd_train(const RunConfig& rc, std::ostream& out) {
  const auto ds = load_ds(rc);
  const std::size_t k = resolve_k(rc);
  JsonLines trace(rc.out_dir() / "train_trace.jsonl");
  const auto run = train_with(rc, ds, k, &trace);
  const json meta{{"phase", "retrain"},
                  {"k", k},
                  {"best_epoch", run.fit.best_epoch},
                  {"best_val_mrr10", run.fit.best_val_mrr},
                  {"epochs", run.fit.trace.size()}};
  model::save_checkpoint(rc.path_or("checkpoint", "model.ckpt"),
                         {run.fit.best.config, run.fit.best.params, run.fit.best.arch, meta});
  write_json(rc.out_dir() / "train_summary.json", meta);
  out << meta.dump() << "\n";
}

void cmd_eval(const RunConfig& rc, std::ostream& out) {
  const auto ckpt = model::load_checkpoint(rc.path_or("checkpoint", "model.ckpt"));
  const auto ds = data::load_dataset(rc.path_or("dataset", "dataset.txt"));
  if (ckpt.config.num_items != ds.num_items || ckpt.config.max_len != ds.max_len) {
    throw DataError("checkpoint and dataset disagree on item count or sequence length");
  }
  const model::Model m{ckpt.config, ckpt.params, ckpt.arch};
  const json rec = test_metrics(rc, m, ds);
  write_json(rc.out_dir() / "metrics.json", rec);
  out << rec.dump() << "\n";
}

json run_record(const RunConfig& rc, const data::SequenceDataset& ds, std::size_t k) {
  const auto run = train_with(rc, ds, k, nullptr);
  json rec = test_metrics(rc, run.fit.best, ds);
  rec["k"] = k;
  rec["best_epoch"] = run.fit.best_epoch;
  rec["val_mrr10"] = run.fit.best_val_mrr;
  return rec;
}

void cmd_sweep(const RunConfig& rc, std::ostream& out) {
  const auto ds = load_ds(rc);
  const std::size_t k = resolve_k(rc);
  JsonLines lines(rc.out_dir() / "sweep.jsonl");
  for (std::size_t layers : rc.counts("sweep-L")) {
    for (std::size_t dim : rc.counts("sweep-D")) {
      RunConfig cell = rc;
      cell.set("L", std::to_string(layers));
      cell.set("D", std::to_string(dim));
      json rec = run_record(cell, ds, k);
      rec["L"] = layers;
      rec["D"] = dim;
      lines.write(rec);
      out << rec.dump() << "\n";
    }
  }
}

void cmd_ablate(const RunConfig& rc, std::ostream& out) {
  const auto ds = load_ds(rc);
  const std::size_t k = resolve_k(rc);
  struct Variant {
    std::string name;
    bool no_seq, no_ch;
  };
  std::vector<Variant> variants;
  const bool no_seq = rc.flag("disable-sequence-mixer");
  const bool no_ch = rc.flag("disable-channel-mixer");
  if (no_seq || no_ch) {
    variants.push_back({no_seq && no_ch ? "no_mixers" : no_seq ? "no_sequence_mixer" : "no_channel_mixer",
                        no_seq, no_ch});
  } else {
    variants = {{"full", false, false}, {"no_sequence_mixer", true, false}, {"no_channel_mixer", false, true}};
  }
  JsonLines lines(rc.out_dir() / "ablate.jsonl");
  for (const auto& v : variants) {
    RunConfig cell = rc;
    cell.set("disable-sequence-mixer", v.no_seq ? "true" : "false");
    cell.set("disable-channel-mixer", v.no_ch ? "true" : "false");
    json rec = run_record(cell, ds, k);
    rec["variant"] = v.name;
    lines.write(rec);
    out << rec.dump() << "\n";
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void cmd_bench(const RunConfig& rc, std::ostream& out) {
  const std::size_t reps = std::max<std::size_t>(1, rc.count("bench-reps"));
  const std::size_t batch = std::max<std::size_t>(1, rc.count("bench-batch"));
  const std::size_t items = std::max<std::size_t>(2, rc.count("vocab"));
  JsonLines lines(rc.out_dir() / "bench.jsonl");
  std::vector<double> xs, ys;
  for (std::size_t t_len : rc.counts("bench-T")) {
    RunConfig cell = rc;
    cell.set("T", std::to_string(t_len));
    std::vector<std::size_t> ks;
    for (std::size_t k : rc.counts("K"))
      if (k < t_len) ks.push_back(k);
    if (ks.empty()) throw ConfigError("no candidate length is below T=" + std::to_string(t_len));
    std::string klist;
    for (std::size_t k : ks) klist += (klist.empty() ? "" : ",") + std::to_string(k);
    cell.set("K", klist);
    const auto mc = cell.model_config(items);
    numkit::Rng rng = numkit::Rng(rc.seed()).split(t_len);
    const auto m = model::Model::create(mc, rng);
    std::vector<std::uint32_t> inputs(batch * t_len);
    for (auto& i : inputs) i = static_cast<std::uint32_t>(1 + rng.uniform_int(items));

    auto forward = [&] {
      numkit::Tape tape;
      const auto b = model::bind(tape, m.params, m.arch, false);
      model::ForwardContext ctx;
      return tape.value(model::hidden_batch(tape, b, mc, inputs, {}, ctx))(0, 0);
    };
    for (int w = 0; w < 3; ++w) forward();
    std::vector<double> times;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink = forward();
      (void)sink;
      times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    const double med = median(times);
    xs.push_back(std::log(static_cast<double>(t_len)));
    ys.push_back(std::log(med));
    const json rec{{"T", t_len}, {"median_ms", med}, {"reps", reps}, {"batch", batch}};
    lines.write(rec);
    out << rec.dump() << "\n";
  }
  double exponent = 0.0;
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  const json summary{{"exponent", exponent}, {"points", xs.size()}};
  write_json(rc.out_dir() / "bench_summary.json", summary);
  out << summary.dump() << "\n";
}

}  // namespace

void run_command(const std::string& command, const RunConfig& rc, std::ostream& out) {
  prepare(command, rc);
  if (command == "ingest") return cmd_ingest(rc, out);
  if (command == "synth") return cmd_synth(rc, out);
  if (command == "search") return cmd_search(rc, out);
  if (command == "train") return cmd_train(rc, out);
  if (command == "eval") return cmd_eval(rc, out);
  if (command == "sweep") return cmd_sweep(rc, out);
  if (command == "ablate") return cmd_ablate(rc, out);
  if (command == "bench") return cmd_bench(rc, out);
  throw ConfigError("unknown command '" + command + "'");
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential recommendation with searched short-term windows"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> values;
  std::string config_path;
  const std::map<std::string, std::string> about = {
      {"ingest", "parse an interaction log into a leave-one-out dataset"},
      {"synth", "generate a planted-dependency dataset"},
      {"search", "search the short-term window length"},
      {"train", "retrain with the selected window and early stopping"},
      {"eval", "rank test targets against sampled negatives"},
      {"sweep", "train over a grid of layer counts and embedding sizes"},
      {"ablate", "train with mixers disabled"},
      {"bench", "time forward passes over sequence lengths"},
  };
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const auto& spec : key_specs()) {
      const std::string flag = "--" + spec.key;
      if (spec.kind == KeyKind::kBool) {
        sub->add_flag(flag + "{true}", values[spec.key], spec.help);
      } else {
        sub->add_option(flag, values[spec.key], spec.help + " [" + spec.default_value + "]");
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    std::map<std::string, std::string> flags;
    for (const auto& spec : key_specs()) {
      if (chosen->count("--" + spec.key) > 0) flags[spec.key] = values[spec.key];
    }
    const auto file = config_path.empty() ? std::map<std::string, std::string>{}
                                          : load_config_file(config_path);
    const RunConfig rc = RunConfig::resolve(file, flags);
    run_command(chosen->get_name(), rc, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace automlp::cli
