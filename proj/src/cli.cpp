#include "mtgae/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mtgae/dataset.hpp"
#include "mtgae/errors.hpp"
#include "mtgae/model.hpp"
#include "mtgae/train.hpp"

namespace mtgae::cli {

namespace fs = std::filesystem;

namespace {

/// Invalid flag combination or value; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Flat `key = value` file. Keys name long options of `sub` (with '_' or '-');
/// options already given on the command line keep their command-line value.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config '" + path + "'");
  }
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.emplace(key, line_no).second) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

struct DataOptions {
  std::string edges;
  std::string features;
  std::string labels;
  bool directed = false;
  bool raw_features = false;
  std::size_t num_nodes = 0;

  void add_to(CLI::App& sub, bool edges_required) {
    auto* e = sub.add_option("--edges", edges, "Edge list (one 'u v' pair per line)")
                  ->check(CLI::ExistingFile);
    if (edges_required) e->required();
    sub.add_option("--features", features, "Node features (dense CSV or 'node feat value')")
        ->check(CLI::ExistingFile);
    sub.add_option("--labels", labels, "Node labels ('node class' per line)")->check(CLI::ExistingFile);
    sub.add_flag("--directed", directed, "Treat edges as directed");
    sub.add_flag("--raw-features", raw_features, "Skip row normalization of features");
    sub.add_option("--num-nodes", num_nodes, "Node count (default: inferred)");
  }

  DatasetPaths paths() const {
    DatasetPaths p;
    p.edges = edges;
    p.features = features;
    p.labels = labels;
    p.directed = directed;
    p.normalize_features = !raw_features;
    if (num_nodes > 0) p.num_nodes = num_nodes;
    return p;
  }
};

struct ModelOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::string dropout = "auto";
  std::string patience = "10";
  std::string monitor = "auto";
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 128;

  void add_to(CLI::App& sub) {
    sub.add_option("--epochs", epochs, "Maximum training epochs")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--batch-size", batch_size, "Rows per mini-batch")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--lr", lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    sub.add_option("--dropout", dropout, "Input dropout rate in [0, 1) or 'auto'")
        ->capture_default_str();
    sub.add_option("--patience", patience, "Early-stopping patience in epochs or 'inf'")
        ->capture_default_str();
    sub.add_option("--monitor", monitor, "val_combined_lp | val_accuracy | val_loss | auto")
        ->capture_default_str();
    sub.add_option("--hidden1", hidden1, "First hidden layer width")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--hidden2", hidden2, "Embedding width")->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  train::TrainConfig config(train::Mode mode, std::uint64_t seed) const {
    train::TrainConfig c;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.lr = lr;
    c.mode = mode;
    c.seed = seed;
    c.hidden1 = hidden1;
    c.hidden2 = hidden2;
    try {
      if (dropout != "auto") c.dropout = std::stod(dropout);
      if (patience == "inf") {
        c.patience = std::nullopt;
      } else {
        const long long p = std::stoll(patience);
        if (p < 0) throw std::invalid_argument("negative");
        c.patience = static_cast<std::size_t>(p);
      }
      if (monitor != "auto") c.monitor = train::parse_monitor(monitor);
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("invalid training option: ") + e.what());
    } catch (const std::out_of_range& e) {
      throw UsageError(std::string("invalid training option: ") + e.what());
    }
    return c;
  }
};

void check_fractions(double test_frac, double val_frac) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw UsageError("--test-frac must lie in (0, 1)");
  }
  if (!(val_frac >= 0.0 && val_frac < 1.0) || test_frac + val_frac >= 1.0) {
    throw UsageError("--val-frac must lie in [0, 1) with test + val < 1");
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ArtifactError("cannot open '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_history(const fs::path& path, const std::vector<train::EpochRecord>& history) {
  std::ostringstream s;
  s << "epoch,train_loss,val_metric\n";
  for (const auto& e : history) {
    s << e.epoch << ',' << fmt("%.17g", e.train_loss) << ',' << fmt("%.17g", e.val_metric) << '\n';
  }
  write_text(path, s.str());
}

std::string show(const std::optional<double>& v) { return v ? fmt("%.4f", *v) : "-"; }

// ---------------------------------------------------------------------------
// split

struct SplitCommand {
  DataOptions data;
  double test_frac = 0.10;
  double val_frac = 0.05;
  std::uint64_t seed = 0;
  std::size_t per_class = 20;
  std::size_t n_val = 500;
  std::size_t n_test = 1000;
  std::string out_dir;

  void add_to(CLI::App& sub) {
    data.add_to(sub, true);
    sub.add_option("--test-frac", test_frac, "Fraction of edges held out for testing")
        ->capture_default_str();
    sub.add_option("--val-frac", val_frac, "Fraction of edges held out for validation")
        ->capture_default_str();
    sub.add_option("--seed", seed, "Split seed")->capture_default_str();
    sub.add_option("--per-class", per_class, "Training labels per class")->capture_default_str();
    sub.add_option("--n-val", n_val, "Validation nodes")->capture_default_str();
    sub.add_option("--n-test", n_test, "Test nodes")->capture_default_str();
    sub.add_option("--out", out_dir, "Output directory")->required();
  }

  int run(std::ostream& out) const {
    check_fractions(test_frac, val_frac);
    const auto dataset = load_dataset(data.paths());
    const auto split = graph::sample_link_split(dataset.full, test_frac, val_frac, seed);
    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "split.json", graph::link_split_to_json(split));
    out << "nodes " << dataset.n() << ", edges " << dataset.full.positive_pairs().size() << "\n";
    out << "test " << split.test_pos.size() << " pos / " << split.test_neg.size() << " neg, val "
        << split.val_pos.size() << " pos / " << split.val_neg.size() << " neg\n";
    if (dataset.nodes) {
      const auto nodes = graph::sample_node_split(*dataset.nodes, per_class, n_val, n_test, seed);
      write_json(fs::path(out_dir) / "node_split.json", graph::node_split_to_json(nodes));
      out << "nodes: train " << nodes.train_nodes.size() << ", val " << nodes.val_nodes.size()
          << ", test " << nodes.test_nodes.size() << "\n";
    }
    return kSuccess;
  }
};

// ---------------------------------------------------------------------------
// train

struct RunSummary {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  train::MetricsReport report;
};

nlohmann::json mean_metrics(const std::vector<RunSummary>& runs) {
  nlohmann::json j = nlohmann::json::object();
  const auto add = [&](const char* name, auto pick) {
    std::vector<double> values;
    for (const auto& r : runs) {
      if (const auto v = pick(r.report)) values.push_back(*v);
    }
    if (values.empty()) return;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    j[name] = {{"mean", mean}, {"std", std::sqrt(var)}, {"runs", values.size()}};
  };
  add("auc", [](const train::MetricsReport& r) { return r.auc; });
  add("ap", [](const train::MetricsReport& r) { return r.ap; });
  add("combined_lp", [](const train::MetricsReport& r) { return r.combined_lp; });
  add("accuracy", [](const train::MetricsReport& r) { return r.accuracy; });
  return j;
}

void print_table(std::ostream& out, const std::vector<RunSummary>& runs) {
  out << "seed  epochs  best     auc      ap  combined  accuracy\n";
  for (const auto& r : runs) {
    char line[160];
    std::snprintf(line, sizeof line, "%4llu  %6zu  %4zu  %6s  %6s  %8s  %8s\n",
                  static_cast<unsigned long long>(r.seed), r.epochs, r.best_epoch,
                  show(r.report.auc).c_str(), show(r.report.ap).c_str(),
                  show(r.report.combined_lp).c_str(), show(r.report.accuracy).c_str());
    out << line;
  }
  if (runs.size() > 1) {
    const auto means = mean_metrics(runs);
    const auto m = [&](const char* k) -> std::optional<double> {
      if (!means.contains(k)) return std::nullopt;
      return means[k]["mean"].get<double>();
    };
    char line[160];
    std::snprintf(line, sizeof line, "mean  %6s  %4s  %6s  %6s  %8s  %8s\n", "", "",
                  show(m("auc")).c_str(), show(m("ap")).c_str(), show(m("combined_lp")).c_str(),
                  show(m("accuracy")).c_str());
    out << line;
  }
}

struct TrainCommand {
  DataOptions data;
  ModelOptions model;
  std::string mode = "link_only";
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::string split_path;
  std::string node_split_path;
  bool auto_split = false;
  double test_frac = 0.10;
  double val_frac = 0.05;
  std::optional<std::uint64_t> split_seed;
  std::size_t per_class = 20;
  std::size_t n_val = 500;
  std::size_t n_test = 1000;
  std::string out_dir;
  std::string config_path;

  void add_to(CLI::App& sub) {
    sub.add_option("--config", config_path, "Flat 'key = value' file; flags override it")
        ->check(CLI::ExistingFile);
    data.add_to(sub, false);
    model.add_to(sub);
    sub.add_option("--mode", mode, "link_only | multitask | reconstruction")->capture_default_str();
    sub.add_option("--seed", seed, "Run seed")->capture_default_str();
    sub.add_option("--seeds", seeds, "Comma-separated run seeds (one run each)")->delimiter(',');
    sub.add_option("--split", split_path, "Link split manifest")->check(CLI::ExistingFile);
    sub.add_option("--node-split", node_split_path, "Node split manifest")->check(CLI::ExistingFile);
    sub.add_flag("--auto-split", auto_split, "Sample the splits instead of loading them");
    sub.add_option("--test-frac", test_frac, "Held-out test edge fraction (--auto-split)")
        ->capture_default_str();
    sub.add_option("--val-frac", val_frac, "Held-out validation edge fraction (--auto-split)")
        ->capture_default_str();
    sub.add_option("--split-seed", split_seed, "Seed of sampled splits (default: run seed)");
    sub.add_option("--per-class", per_class, "Training labels per class (--auto-split)")
        ->capture_default_str();
    sub.add_option("--n-val", n_val, "Validation nodes (--auto-split)")->capture_default_str();
    sub.add_option("--n-test", n_test, "Test nodes (--auto-split)")->capture_default_str();
    sub.add_option("--out", out_dir, "Output directory");
  }

  int run(std::ostream& out, std::ostream& err) {
    if (data.edges.empty()) throw UsageError("--edges is required");
    if (out_dir.empty()) throw UsageError("--out is required");
    train::Mode train_mode;
    try {
      train_mode = train::parse_mode(mode);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!split_path.empty() && auto_split) {
      throw UsageError("--split and --auto-split are mutually exclusive");
    }
    if (auto_split) check_fractions(test_frac, val_frac);
    if (split_path.empty() && !auto_split && train_mode != train::Mode::reconstruction) {
      throw UsageError("--split PATH or --auto-split is required");
    }
    if (train_mode == train::Mode::multitask) {
      if (data.labels.empty()) throw UsageError("multitask mode needs --labels");
      if (node_split_path.empty() && !auto_split) {
        throw UsageError("multitask mode needs --node-split PATH or --auto-split");
      }
    }
    if (seeds.empty()) seeds.push_back(seed);
    // Reject bad training options before any data is read.
    model.config(train_mode, seeds.front());

    const auto paths = data.paths();
    const auto dataset = load_dataset(paths);

    std::vector<RunSummary> runs;
    for (const auto run_seed : seeds) {
      const fs::path dir = seeds.size() > 1 ? fs::path(out_dir) / ("seed-" + std::to_string(run_seed))
                                            : fs::path(out_dir);
      fs::create_directories(dir);
      const auto config = model.config(train_mode, run_seed);
      const std::uint64_t sseed = split_seed.value_or(run_seed);

      train::TrainingSet set;
      set.features = dataset.features;
      if (!split_path.empty()) {
        set.split = graph::link_split_from_json(read_json(split_path), dataset.full);
      } else if (auto_split) {
        set.split = graph::sample_link_split(dataset.full, test_frac, val_frac, sseed);
      } else {
        set.split.train = dataset.full;
        set.split.seed = sseed;
      }
      if (dataset.nodes) {
        set.nodes = dataset.nodes;
        if (!node_split_path.empty()) {
          set.node_split = graph::node_split_from_json(read_json(node_split_path), dataset.n());
        } else if (auto_split && train_mode == train::Mode::multitask) {
          set.node_split = graph::sample_node_split(*dataset.nodes, per_class, n_val, n_test, sseed);
        }
      }

      train::TrainResult result;
      try {
        result = train::train(config, set);
      } catch (const NumericError& e) {
        err << "error: " << e.what() << " (last finite loss " << fmt("%.17g", e.last_finite_loss())
            << ")\n";
        return kNumeric;
      }

      auto report = train::evaluate(result.params, set);
      report.history = result.history;

      nlohmann::json ckpt_config = {{"train", train::config_to_json(config)},
                                    {"dataset", dataset_to_json(paths)},
                                    {"dropout", result.dropout}};
      model::save_checkpoint((dir / "checkpoint.bin").string(),
                             {result.params, result.zeta, ckpt_config});
      write_history(dir / "history.csv", result.history);
      write_json(dir / "split.json", graph::link_split_to_json(set.split));
      if (set.node_split) {
        write_json(dir / "node_split.json", graph::node_split_to_json(*set.node_split));
      }
      auto j = train::report_to_json(report);
      j["config"] = train::config_to_json(config);
      j["seed"] = run_seed;
      j["dataset"] = dataset_to_json(paths);
      j["zeta"] = result.zeta;
      j["dropout"] = result.dropout;
      j["best_epoch"] = result.best_epoch;
      write_json(dir / "report.json", j);

      runs.push_back({run_seed, result.history.size(), result.best_epoch, std::move(report)});
    }

    if (runs.size() > 1) {
      nlohmann::json summary = {{"seeds", seeds}, {"mean", mean_metrics(runs)}};
      write_json(fs::path(out_dir) / "summary.json", summary);
    }
    print_table(out, runs);
    return kSuccess;
  }
};

// ---------------------------------------------------------------------------
// eval

struct EvalCommand {
  DataOptions data;
  std::vector<std::string> checkpoints;
  std::vector<std::string> splits;
  std::vector<std::string> node_splits;
  std::string out_path;

  void add_to(CLI::App& sub) {
    sub.add_option("--checkpoint", checkpoints, "Checkpoint file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    sub.add_option("--split", splits, "Link split manifest (one, or one per checkpoint)")
        ->check(CLI::ExistingFile);
    sub.add_option("--node-split", node_splits, "Node split manifest (one, or one per checkpoint)")
        ->check(CLI::ExistingFile);
    data.add_to(sub, false);
    sub.add_option("--out", out_path, "Write the report JSON here");
  }

  static const std::string& pick(const std::vector<std::string>& list, std::size_t i,
                                 const char* flag, std::size_t n) {
    static const std::string none;
    if (list.empty()) return none;
    if (list.size() == 1) return list.front();
    if (list.size() != n) {
      throw UsageError(std::string(flag) + " must be given once or once per checkpoint");
    }
    return list[i];
  }

  DatasetPaths resolve_paths(const model::Checkpoint& ckpt, CLI::App& sub) const {
    DatasetPaths p;
    if (ckpt.config.contains("dataset")) p = dataset_from_json(ckpt.config["dataset"]);
    if (sub.count("--edges")) p.edges = data.edges;
    if (sub.count("--features")) p.features = data.features;
    if (sub.count("--labels")) p.labels = data.labels;
    if (sub.count("--directed")) p.directed = data.directed;
    if (sub.count("--raw-features")) p.normalize_features = !data.raw_features;
    if (sub.count("--num-nodes")) p.num_nodes = data.num_nodes;
    if (p.edges.empty()) {
      throw UsageError("checkpoint names no dataset; pass --edges");
    }
    return p;
  }

  int run(CLI::App& sub, std::ostream& out) const {
    const std::size_t n = checkpoints.size();
    if (splits.empty()) throw UsageError("--split is required");
    std::vector<RunSummary> runs;
    auto reports = nlohmann::json::array();
    std::optional<DatasetPaths> loaded_paths;
    std::optional<Dataset> dataset;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ckpt = model::load_checkpoint(checkpoints[i]);
      const auto paths = resolve_paths(ckpt, sub);
      if (!loaded_paths || dataset_to_json(*loaded_paths) != dataset_to_json(paths)) {
        dataset = load_dataset(paths);
        loaded_paths = paths;
      }
      const auto dims = ckpt.params.dims();
      const std::size_t f = dataset->features ? static_cast<std::size_t>(dataset->features->cols()) : 0;
      if (dims.input_dim != dataset->n() + f) {
        throw ArtifactError("checkpoint input width " + std::to_string(dims.input_dim) +
                            " does not match the dataset (" + std::to_string(dataset->n()) +
                            " nodes + " + std::to_string(f) + " features)");
      }
      if (dims.num_classes > 0 && (!dataset->nodes || dataset->nodes->num_classes != dims.num_classes)) {
        throw ArtifactError("checkpoint has " + std::to_string(dims.num_classes) +
                            " classes but the dataset labels do not match");
      }

      train::TrainingSet set;
      set.features = dataset->features;
      set.split = graph::link_split_from_json(read_json(pick(splits, i, "--split", n)), dataset->full);
      set.nodes = dataset->nodes;
      const auto& ns = pick(node_splits, i, "--node-split", n);
      if (!ns.empty()) {
        set.node_split = graph::node_split_from_json(read_json(ns), dataset->n());
      }
      auto report = train::evaluate(ckpt.params, set);
      auto j = train::report_to_json(report);
      j.erase("history");
      j["checkpoint"] = checkpoints[i];
      if (ckpt.config.contains("train")) {
        j["config"] = ckpt.config["train"];
        j["seed"] = ckpt.config["train"].value("seed", std::uint64_t{0});
      }
      reports.push_back(std::move(j));
      const std::uint64_t seed = ckpt.config.contains("train")
                                     ? ckpt.config["train"].value("seed", std::uint64_t{0})
                                     : i;
      runs.push_back({seed, 0, 0, std::move(report)});
    }

    nlohmann::json result = n == 1 ? reports.front()
                                   : nlohmann::json{{"runs", reports}, {"mean", mean_metrics(runs)}};
    if (!out_path.empty()) {
      write_json(out_path, result);
    }
    out << "seed     auc      ap  combined  accuracy\n";
    for (const auto& r : runs) {
      char line[128];
      std::snprintf(line, sizeof line, "%4llu  %6s  %6s  %8s  %8s\n",
                    static_cast<unsigned long long>(r.seed), show(r.report.auc).c_str(),
                    show(r.report.ap).c_str(), show(r.report.combined_lp).c_str(),
                    show(r.report.accuracy).c_str());
      out << line;
    }
    if (n > 1) {
      const auto means = mean_metrics(runs);
      for (const char* key : {"auc", "ap", "combined_lp", "accuracy"}) {
        if (!means.contains(key)) continue;
        out << "mean " << key << " " << fmt("%.4f", means[key]["mean"].get<double>()) << " (std "
            << fmt("%.4f", means[key]["std"].get<double>()) << ", " << n << " runs)\n";
      }
    }
    return kSuccess;
  }
};

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructCommand {
  DataOptions data;
  ModelOptions model;
  double missing_frac = 0.0;
  std::vector<std::size_t> ks;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string history_path;
  std::string config_path;

  void add_to(CLI::App& sub) {
    sub.add_option("--config", config_path, "Flat 'key = value' file; flags override it")
        ->check(CLI::ExistingFile);
    sub.add_option("--edges", data.edges, "Edge list")->check(CLI::ExistingFile);
    sub.add_flag("--directed", data.directed, "Treat edges as directed");
    sub.add_option("--num-nodes", data.num_nodes, "Node count (default: inferred)");
    model.add_to(sub);
    sub.add_option("--missing-frac", missing_frac, "Fraction of edges hidden before training")
        ->capture_default_str();
    sub.add_option("--k-list", ks, "Comma-separated k values")->delimiter(',');
    sub.add_option("--seed", seed, "Run seed")->capture_default_str();
    sub.add_option("--out", out_path, "precision@k CSV (default: stdout)");
    sub.add_option("--history", history_path, "Also write the training history CSV here");
  }

  int run(std::ostream& out, std::ostream& err) const {
    if (data.edges.empty()) throw UsageError("--edges is required");
    if (ks.empty()) throw UsageError("--k-list is required");
    if (!(missing_frac >= 0.0 && missing_frac < 1.0)) {
      throw UsageError("--missing-frac must lie in [0, 1)");
    }
    auto config = model.config(train::Mode::reconstruction, seed);
    DatasetPaths paths = data.paths();
    const auto dataset = load_dataset(paths);
    const std::size_t candidates = train::candidate_count(dataset.full);
    std::vector<std::size_t> valid;
    for (const auto k : ks) {
      if (k == 0 || k > candidates) {
        err << "warning: k = " << k << " is outside 1.." << candidates << "; row omitted\n";
      } else {
        valid.push_back(k);
      }
    }

    train::ReconstructionResult result;
    try {
      result = train::reconstruction_experiment(dataset.full, missing_frac, seed, config, valid);
    } catch (const NumericError& e) {
      err << "error: " << e.what() << " (last finite loss " << fmt("%.17g", e.last_finite_loss())
          << ")\n";
      return kNumeric;
    }

    std::ostringstream csv;
    csv << "k,precision\n";
    for (const auto& [k, p] : result.curve) {
      csv << k << ',' << fmt("%.17g", p) << '\n';
    }
    if (out_path.empty()) {
      out << csv.str();
    } else {
      write_text(out_path, csv.str());
      out << "removed " << result.removed.size() << " of " << dataset.full.positive_pairs().size()
          << " edges; random baseline " << fmt("%.6f", result.random_baseline) << "\n";
    }
    if (!history_path.empty()) {
      write_history(history_path, result.training.history);
    }
    return kSuccess;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task graph autoencoder: link prediction and node classification"};
  app.require_subcommand(1);

  SplitCommand split;
  TrainCommand train_cmd;
  EvalCommand eval;
  ReconstructCommand reconstruct;
  auto* split_sub = app.add_subcommand("split", "Sample held-out edge and node splits");
  split.add_to(*split_sub);
  auto* train_sub = app.add_subcommand("train", "Train a model and write checkpoint, history, report");
  train_cmd.add_to(*train_sub);
  auto* eval_sub = app.add_subcommand("eval", "Recompute test metrics from saved checkpoints");
  eval.add_to(*eval_sub);
  auto* recon_sub = app.add_subcommand("reconstruct", "precision@k network reconstruction experiment");
  reconstruct.add_to(*recon_sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kSuccess : kUsage;
    }

    if (*split_sub) return split.run(out);
    if (*train_sub) {
      if (!train_cmd.config_path.empty()) apply_config(*train_sub, train_cmd.config_path);
      return train_cmd.run(out, err);
    }
    if (*eval_sub) return eval.run(*eval_sub, out);
    if (*recon_sub) {
      if (!reconstruct.config_path.empty()) apply_config(*recon_sub, reconstruct.config_path);
      return reconstruct.run(out, err);
    }
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << " (last finite loss "
        << fmt("%.17g", e.last_finite_loss()) << ")\n";
    return kNumeric;
  } catch (const ArtifactError& e) {
    err << "artifact error: " << e.what() << "\n";
    return kArtifact;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace mtgae::cli
