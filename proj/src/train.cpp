#include "mtgae/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>

#include "mtgae/errors.hpp"
#include "mtgae/metrics.hpp"

namespace mtgae::train {

namespace {

constexpr std::size_t kEvalChunk = 256;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::link_only: return "link_only";
    case Mode::multitask: return "multitask";
    case Mode::reconstruction: return "reconstruction";
  }
  return "unknown";
}

std::string to_string(Monitor monitor) {
  switch (monitor) {
    case Monitor::val_combined_lp: return "val_combined_lp";
    case Monitor::val_accuracy: return "val_accuracy";
    case Monitor::val_loss: return "val_loss";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "link_only") return Mode::link_only;
  if (text == "multitask") return Mode::multitask;
  if (text == "reconstruction") return Mode::reconstruction;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

Monitor parse_monitor(const std::string& text) {
  if (text == "val_combined_lp") return Monitor::val_combined_lp;
  if (text == "val_accuracy") return Monitor::val_accuracy;
  if (text == "val_loss") return Monitor::val_loss;
  throw std::invalid_argument("unknown monitor '" + text + "'");
}

Monitor TrainConfig::effective_monitor() const {
  if (monitor) {
    return *monitor;
  }
  return mode == Mode::multitask ? Monitor::val_accuracy : Monitor::val_combined_lp;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (dropout && !(*dropout >= 0.0 && *dropout < 1.0)) {
    throw std::invalid_argument("dropout must lie in [0, 1)");
  }
  if (hidden1 < 1 || hidden2 < 1) throw std::invalid_argument("hidden sizes must be >= 1");
}

nlohmann::json config_to_json(const TrainConfig& c) {
  nlohmann::json j = {
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"lr", c.lr},
      {"seed", c.seed},
      {"monitor", to_string(c.effective_monitor())},
      {"mode", to_string(c.mode)},
      {"hidden1", c.hidden1},
      {"hidden2", c.hidden2},
  };
  j["dropout"] = c.dropout ? nlohmann::json(*c.dropout) : nlohmann::json("auto");
  j["patience"] = c.patience ? nlohmann::json(*c.patience) : nlohmann::json("inf");
  return j;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j = {
      {"auc", opt(r.auc)},
      {"ap", opt(r.ap)},
      {"combined_lp", opt(r.combined_lp)},
      {"accuracy", opt(r.accuracy)},
  };
  auto curve = nlohmann::json::array();
  for (const auto& [k, p] : r.precision_at_k) {
    curve.push_back({k, p});
  }
  j["precision_at_k"] = std::move(curve);
  auto history = nlohmann::json::array();
  for (const auto& e : r.history) {
    history.push_back({{"epoch", e.epoch},
                       {"train_loss", e.train_loss},
                       {"val_metric", std::isfinite(e.val_metric) ? nlohmann::json(e.val_metric)
                                                                  : nlohmann::json(nullptr)}});
  }
  j["history"] = std::move(history);
  return j;
}

double default_dropout(const graph::ObservedAdjacency& train_adj) {
  const double n = static_cast<double>(train_adj.n());
  if (n < 2) {
    return 0.0;
  }
  const double density = static_cast<double>(train_adj.observed_positive_count()) / (n * (n - 1));
  return density < 0.01 ? 0.5 : 0.0;
}

std::vector<double> score_pairs(const model::ModelParams& params,
                                const graph::ObservedAdjacency& observed,
                                const std::optional<nn::Matrix>& features,
                                std::span<const graph::Edge> pairs) {
  // Each pair needs entry (u, v), plus (v, u) when undirected.
  struct Request {
    std::size_t row, col, pair;
  };
  std::vector<Request> requests;
  requests.reserve(2 * pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    requests.push_back({pairs[p].u, pairs[p].v, p});
    if (observed.undirected()) {
      requests.push_back({pairs[p].v, pairs[p].u, p});
    }
  }
  std::sort(requests.begin(), requests.end(),
            [](const Request& a, const Request& b) { return a.row < b.row; });

  std::vector<double> scores(pairs.size(), 0.0);
  const double weight = observed.undirected() ? 0.5 : 1.0;
  std::size_t next = 0;
  while (next < requests.size()) {
    std::vector<std::size_t> nodes;
    std::size_t end = next;
    while (end < requests.size() && (nodes.size() < kEvalChunk || requests[end].row == nodes.back())) {
      if (nodes.empty() || nodes.back() != requests[end].row) {
        nodes.push_back(requests[end].row);
      }
      ++end;
    }
    const auto rows = graph::gather_rows(observed, features, nodes);
    const nn::Matrix probs = model::predict_links(params, rows.inputs);
    std::size_t r = 0;
    for (std::size_t k = next; k < end; ++k) {
      while (nodes[r] != requests[k].row) {
        ++r;
      }
      scores[requests[k].pair] +=
          weight * probs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(requests[k].col));
    }
    next = end;
  }
  if (!std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); })) {
    throw NumericError("model produced non-finite link scores", nan());
  }
  return scores;
}

LinkMetrics evaluate_links(const model::ModelParams& params, const graph::ObservedAdjacency& observed,
                           const std::optional<nn::Matrix>& features, const graph::EdgeList& pos,
                           const graph::EdgeList& neg) {
  if (pos.empty() || neg.empty()) {
    throw std::invalid_argument("evaluate_links needs positive and negative pairs");
  }
  graph::EdgeList pairs = pos;
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  const auto scores = score_pairs(params, observed, features, pairs);
  std::vector<int> labels(pairs.size(), 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(pos.size()), 1);
  LinkMetrics m;
  m.auc = metrics::auc(scores, labels);
  m.ap = metrics::average_precision(scores, labels);
  m.combined = metrics::combined_lp(m.auc, m.ap);
  return m;
}

std::vector<std::size_t> predict_classes(const model::ModelParams& params,
                                         const graph::ObservedAdjacency& observed,
                                         const std::optional<nn::Matrix>& features,
                                         std::span<const std::size_t> nodes) {
  std::vector<std::size_t> out;
  out.reserve(nodes.size());
  for (std::size_t start = 0; start < nodes.size(); start += kEvalChunk) {
    const auto chunk = nodes.subspan(start, std::min(kEvalChunk, nodes.size() - start));
    const auto rows = graph::gather_rows(observed, features, chunk);
    const nn::Matrix probs = model::predict_nodes(params, rows.inputs);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const nn::RowVector row = probs.row(r);
      out.push_back(metrics::argmax({row.data(), static_cast<std::size_t>(row.size())}));
    }
  }
  return out;
}

double evaluate_nodes(const model::ModelParams& params, const graph::ObservedAdjacency& observed,
                      const std::optional<nn::Matrix>& features, std::span<const std::size_t> nodes,
                      const std::vector<std::optional<std::size_t>>& labels) {
  if (nodes.empty()) {
    throw std::invalid_argument("evaluate_nodes: empty node set");
  }
  std::vector<std::size_t> truth;
  truth.reserve(nodes.size());
  for (const auto i : nodes) {
    if (i >= labels.size() || !labels[i]) {
      throw std::invalid_argument("evaluate_nodes: node " + std::to_string(i) + " has no label");
    }
    truth.push_back(*labels[i]);
  }
  const auto predicted = predict_classes(params, observed, features, nodes);
  return metrics::accuracy(predicted, truth);
}

namespace {

struct Validator {
  Monitor monitor;
  const TrainingSet& data;

  bool available() const {
    switch (monitor) {
      case Monitor::val_combined_lp:
        return !data.split.val_pos.empty() && !data.split.val_neg.empty();
      case Monitor::val_accuracy:
        return data.node_split && data.nodes && !data.node_split->val_nodes.empty();
      case Monitor::val_loss:
        return !data.split.val_pos.empty() || (data.node_split && !data.node_split->val_nodes.empty());
    }
    return false;
  }

  bool higher_is_better() const { return monitor != Monitor::val_loss; }

  double operator()(const model::ModelParams& params) const {
    const auto& observed = data.split.train;
    switch (monitor) {
      case Monitor::val_combined_lp:
        return evaluate_links(params, observed, data.features, data.split.val_pos, data.split.val_neg)
            .combined;
      case Monitor::val_accuracy:
        return evaluate_nodes(params, observed, data.features, data.node_split->val_nodes,
                              data.nodes->labels);
      case Monitor::val_loss:
        return validation_loss(params);
    }
    return nan();
  }

  // Unweighted BCE on held-out pair scores plus cross-entropy on validation nodes.
  double validation_loss(const model::ModelParams& params) const {
    double total = 0.0;
    const auto& split = data.split;
    if (!split.val_pos.empty()) {
      graph::EdgeList pairs = split.val_pos;
      pairs.insert(pairs.end(), split.val_neg.begin(), split.val_neg.end());
      const auto scores = score_pairs(params, split.train, data.features, pairs);
      double bce = 0.0;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double s = std::clamp(scores[p], 1e-12, 1.0 - 1e-12);
        bce -= p < split.val_pos.size() ? std::log(s) : std::log(1.0 - s);
      }
      total += bce / static_cast<double>(pairs.size());
    }
    if (params.has_classifier() && data.node_split && !data.node_split->val_nodes.empty()) {
      const auto& nodes = data.node_split->val_nodes;
      double ce = 0.0;
      for (std::size_t start = 0; start < nodes.size(); start += kEvalChunk) {
        const auto chunk = std::span(nodes).subspan(start, std::min(kEvalChunk, nodes.size() - start));
        const auto rows = graph::gather_rows(split.train, data.features, chunk);
        const auto fwd = model::forward(params, rows.inputs);
        std::vector<std::optional<std::size_t>> labels;
        for (const auto i : chunk) {
          labels.push_back(data.nodes->labels[i]);
        }
        ce += model::masked_ce_loss(fwd.class_logits, labels) * static_cast<double>(chunk.size());
      }
      total += ce / static_cast<double>(nodes.size());
    }
    return total;
  }
};

}  // namespace

TrainResult train(const TrainConfig& config, const TrainingSet& data) {
  config.validate();
  const auto& adj = data.split.train;
  const std::size_t n = adj.n();
  const std::size_t f = data.features ? static_cast<std::size_t>(data.features->cols()) : 0;
  if (data.features && static_cast<std::size_t>(data.features->rows()) != n) {
    throw std::invalid_argument("feature rows do not match the node count");
  }
  const bool multitask = config.mode == Mode::multitask;
  if (multitask && !(data.nodes && data.nodes->has_labels() && data.node_split)) {
    throw std::invalid_argument("multitask mode needs labels and a node split");
  }

  nn::RngStream root(config.seed);
  auto init_rng = root.fork(0);
  auto shuffle_rng = root.fork(1);
  auto dropout_rng = root.fork(2);

  const model::ModelDims dims{n + f, config.hidden1, config.hidden2,
                              multitask ? data.nodes->num_classes : 0};
  TrainResult result;
  result.params = model::ModelParams::glorot(dims, init_rng);
  result.zeta = graph::compute_zeta(adj);
  result.dropout = config.dropout.value_or(default_dropout(adj));
  auto& params = result.params;

  nn::AdamState adam(nn::AdamConfig{.lr = config.lr}, params.block_sizes());

  std::vector<std::optional<std::size_t>> visible_labels(n);
  if (multitask) {
    for (const auto i : data.node_split->train_nodes) {
      visible_labels.at(i) = data.nodes->labels.at(i);
    }
  }

  const Validator validate{config.effective_monitor(), data};
  const bool early_stopping = validate.available();
  double best = validate.higher_is_better() ? -std::numeric_limits<double>::infinity()
                                            : std::numeric_limits<double>::infinity();
  model::ModelParams best_params;
  std::size_t since_best = 0;
  double last_finite = nan();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    nn::shuffle(std::span<std::size_t>(order), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const auto nodes = std::span(order).subspan(start, std::min(config.batch_size, n - start));
      auto rows = graph::gather_rows(adj, data.features, nodes);
      model::LossInputs loss{std::move(rows.targets), std::move(rows.mask), result.zeta, {}};
      if (multitask) {
        for (const auto i : nodes) {
          loss.labels.push_back(visible_labels[i]);
        }
      } else {
        loss.labels.assign(nodes.size(), std::nullopt);
      }

      const auto fwd = model::forward(params, rows.inputs, true, result.dropout, dropout_rng);
      const double value = model::multitask_loss(fwd, loss);
      if (!std::isfinite(value)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batches + 1),
                           last_finite);
      }
      last_finite = value;
      const auto grads = model::backward(params, fwd, loss);
      nn::adam_update(params.blocks(), grads.blocks(), adam);
      loss_sum += value;
      ++batches;
    }

    for (const auto block : std::as_const(params).blocks()) {
      if (!std::all_of(block.begin(), block.end(), [](double x) { return std::isfinite(x); })) {
        throw NumericError("non-finite parameters after epoch " + std::to_string(epoch), last_finite);
      }
    }

    EpochRecord record{epoch, loss_sum / static_cast<double>(batches), nan()};
    if (early_stopping) {
      try {
        record.val_metric = validate(params);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch), last_finite);
      }
      const bool improved = validate.higher_is_better() ? record.val_metric > best
                                                        : record.val_metric < best;
      if (improved) {
        best = record.val_metric;
        best_params = params;
        result.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    result.history.push_back(record);
    if (early_stopping && config.patience && since_best >= *config.patience) {
      break;
    }
  }

  if (early_stopping && result.best_epoch > 0) {
    params = std::move(best_params);
  } else {
    result.best_epoch = result.history.size();
  }
  params.generation = 0;
  return result;
}

MetricsReport evaluate(const model::ModelParams& params, const TrainingSet& data) {
  MetricsReport report;
  const auto& split = data.split;
  if (!split.test_pos.empty() && !split.test_neg.empty()) {
    const auto m = evaluate_links(params, split.train, data.features, split.test_pos, split.test_neg);
    report.auc = m.auc;
    report.ap = m.ap;
    report.combined_lp = m.combined;
  }
  if (params.has_classifier() && data.nodes && data.node_split &&
      !data.node_split->test_nodes.empty()) {
    report.accuracy = evaluate_nodes(params, split.train, data.features,
                                     data.node_split->test_nodes, data.nodes->labels);
  }
  return report;
}

std::size_t candidate_count(const graph::ObservedAdjacency& adj) {
  const std::size_t n = adj.n();
  return adj.undirected() ? n * (n - 1) / 2 : n * (n - 1);
}

std::vector<std::pair<std::size_t, double>> precision_at_k(
    const model::ModelParams& params, const graph::ObservedAdjacency& observed,
    const std::optional<nn::Matrix>& features, const graph::ObservedAdjacency& truth,
    std::span<const std::size_t> ks) {
  const std::size_t n = observed.n();
  if (truth.n() != n) {
    throw std::invalid_argument("precision_at_k: truth graph size differs");
  }
  const std::size_t candidates = candidate_count(observed);
  std::size_t k_max = 0;
  for (const auto k : ks) {
    if (k == 0 || k > candidates) {
      throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " +
                                  std::to_string(candidates) + " candidate pairs");
    }
    k_max = std::max(k_max, k);
  }

  // Reconstruction probabilities of the adjacency block, stored as float.
  Eigen::MatrixXf probs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t start = 0; start < n; start += kEvalChunk) {
    const auto chunk = std::span(all).subspan(start, std::min(kEvalChunk, n - start));
    const auto rows = graph::gather_rows(observed, features, chunk);
    const nn::Matrix p = model::predict_links(params, rows.inputs);
    probs.middleRows(static_cast<Eigen::Index>(start), p.rows()) =
        p.leftCols(static_cast<Eigen::Index>(n)).cast<float>();
  }

  struct Candidate {
    double score;
    std::size_t i, j;
  };
  // True if a ranks ahead of b: higher score, then lower (i, j).
  const auto ahead = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(ahead)> kept(ahead);
  const bool undirected = observed.undirected();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = undirected ? i + 1 : 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      const double score = undirected ? 0.5 * (static_cast<double>(probs(a, b)) + probs(b, a))
                                      : static_cast<double>(probs(a, b));
      const Candidate c{score, i, j};
      if (kept.size() < k_max) {
        kept.push(c);
      } else if (ahead(c, kept.top())) {
        kept.pop();
        kept.push(c);
      }
    }
  }

  std::vector<Candidate> ranked;
  ranked.reserve(kept.size());
  while (!kept.empty()) {
    ranked.push_back(kept.top());
    kept.pop();
  }
  std::reverse(ranked.begin(), ranked.end());
  std::vector<int> relevance;
  relevance.reserve(ranked.size());
  for (const auto& c : ranked) {
    relevance.push_back(truth.value(c.i, c.j) ? 1 : 0);
  }
  return metrics::precision_at_k(relevance, ks);
}

std::pair<graph::ObservedAdjacency, graph::EdgeList> remove_edges(
    const graph::ObservedAdjacency& full, double missing_frac, std::uint64_t seed) {
  if (!(missing_frac >= 0.0 && missing_frac < 1.0)) {
    throw std::invalid_argument("missing fraction must lie in [0, 1)");
  }
  auto positives = full.positive_pairs();
  const auto count = static_cast<std::size_t>(
      std::floor(missing_frac * static_cast<double>(positives.size()) + 1e-9));
  auto rng = nn::RngStream(seed).fork(4);
  nn::shuffle(std::span<graph::Edge>(positives), rng);
  positives.resize(count);
  graph::ObservedAdjacency observed = full;
  for (const auto& e : positives) {
    observed.set_unknown(e.u, e.v);
  }
  return {std::move(observed), std::move(positives)};
}

ReconstructionResult reconstruction_experiment(const graph::ObservedAdjacency& full,
                                               double missing_frac, std::uint64_t seed,
                                               TrainConfig config, std::span<const std::size_t> ks) {
  auto [observed, removed] = remove_edges(full, missing_frac, seed);
  config.mode = Mode::reconstruction;
  config.seed = seed;

  TrainingSet data;
  data.split.train = std::move(observed);
  data.split.seed = seed;

  ReconstructionResult result;
  result.removed = std::move(removed);
  result.training = train(config, data);

  const std::size_t candidates = candidate_count(full);
  std::vector<std::size_t> valid;
  std::copy_if(ks.begin(), ks.end(), std::back_inserter(valid),
               [&](std::size_t k) { return k >= 1 && k <= candidates; });
  result.curve = precision_at_k(result.training.params, data.split.train, std::nullopt, full, valid);
  result.random_baseline =
      static_cast<double>(full.positive_pairs().size()) / static_cast<double>(candidates);
  return result;
}

}  // namespace mtgae::train
