#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtgae/graph_data.hpp"
#include "mtgae/model.hpp"

namespace mtgae::train {

enum class Mode { link_only, multitask, reconstruction };
enum class Monitor { val_combined_lp, val_accuracy, val_loss };

std::string to_string(Mode mode);
std::string to_string(Monitor monitor);
Mode parse_mode(const std::string& text);
Monitor parse_monitor(const std::string& text);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  /// nullopt: 0.5 when the training graph's off-diagonal density is below 1%, else 0.
  std::optional<double> dropout;
  std::uint64_t seed = 0;
  /// nullopt disables early stopping.
  std::optional<std::size_t> patience = 10;
  /// nullopt: val_accuracy in multitask mode, val_combined_lp otherwise.
  std::optional<Monitor> monitor;
  Mode mode = Mode::link_only;
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 128;

  Monitor effective_monitor() const;
  void validate() const;
};

nlohmann::json config_to_json(const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  /// NaN when no validation data exists for the monitor.
  double val_metric = 0.0;
};

struct MetricsReport {
  std::optional<double> auc;
  std::optional<double> ap;
  std::optional<double> combined_lp;
  std::optional<double> accuracy;
  std::vector<std::pair<std::size_t, double>> precision_at_k;
  std::vector<EpochRecord> history;
};

nlohmann::json report_to_json(const MetricsReport& report);

/// Everything the model sees during training. `split.train` is the observed
/// graph; held-out pairs are unknown there.
struct TrainingSet {
  graph::LinkSplit split;
  std::optional<nn::Matrix> features;
  std::optional<graph::NodeData> nodes;
  std::optional<graph::NodeSplit> node_split;
};

struct TrainResult {
  model::ModelParams params;
  double zeta = 1.0;
  double dropout = 0.0;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

/// Mini-batch Adam over shuffled node rows with early stopping on the
/// validation monitor; the returned parameters are the best snapshot.
/// Throws NumericError if the loss becomes non-finite.
TrainResult train(const TrainConfig& config, const TrainingSet& data);

double default_dropout(const graph::ObservedAdjacency& train_adj);

/// Pair scores (undirected: mean of both directions) using the observed graph
/// as model input. Nodes are evaluated in chunks to bound memory.
std::vector<double> score_pairs(const model::ModelParams& params,
                                const graph::ObservedAdjacency& observed,
                                const std::optional<nn::Matrix>& features,
                                std::span<const graph::Edge> pairs);

struct LinkMetrics {
  double auc = 0.0;
  double ap = 0.0;
  double combined = 0.0;
};

LinkMetrics evaluate_links(const model::ModelParams& params, const graph::ObservedAdjacency& observed,
                           const std::optional<nn::Matrix>& features, const graph::EdgeList& pos,
                           const graph::EdgeList& neg);

/// Argmax class per node (lowest index on ties).
std::vector<std::size_t> predict_classes(const model::ModelParams& params,
                                         const graph::ObservedAdjacency& observed,
                                         const std::optional<nn::Matrix>& features,
                                         std::span<const std::size_t> nodes);

double evaluate_nodes(const model::ModelParams& params, const graph::ObservedAdjacency& observed,
                      const std::optional<nn::Matrix>& features, std::span<const std::size_t> nodes,
                      const std::vector<std::optional<std::size_t>>& labels);

/// Test-set metrics of a trained model: link metrics on the held-out test
/// pairs (when present) and accuracy on the test nodes (when the model has a
/// classification head and a node split is given).
MetricsReport evaluate(const model::ModelParams& params, const TrainingSet& data);

/// Ranks every off-diagonal candidate of the reconstruction (unordered pairs
/// when undirected) by score, best first, and reports precision@k where
/// "relevant" means an edge of `truth`. Throws if a k exceeds the candidate count.
std::vector<std::pair<std::size_t, double>> precision_at_k(
    const model::ModelParams& params, const graph::ObservedAdjacency& observed,
    const std::optional<nn::Matrix>& features, const graph::ObservedAdjacency& truth,
    std::span<const std::size_t> ks);

std::size_t candidate_count(const graph::ObservedAdjacency& adj);

struct ReconstructionResult {
  std::vector<std::pair<std::size_t, double>> curve;
  graph::EdgeList removed;
  TrainResult training;
  /// |E| / #candidates: expected precision of a random ranking.
  double random_baseline = 0.0;
};

/// Removes floor(missing_frac * |E|) edges (marks them unknown), trains in
/// reconstruction mode on what remains and scores precision@k against the
/// original edge set. Only k values within the candidate count are reported.
ReconstructionResult reconstruction_experiment(const graph::ObservedAdjacency& full,
                                               double missing_frac, std::uint64_t seed,
                                               TrainConfig config, std::span<const std::size_t> ks);

/// Marks floor(missing_frac * |E|) uniformly chosen edges unknown.
std::pair<graph::ObservedAdjacency, graph::EdgeList> remove_edges(
    const graph::ObservedAdjacency& full, double missing_frac, std::uint64_t seed);

}  // namespace mtgae::train
