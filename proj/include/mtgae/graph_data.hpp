#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mtgae/nn.hpp"

namespace mtgae::graph {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Dense row-major bit matrix.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols, bool fill = false);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (words_[r * words_per_row_ + c / 64] >> (c % 64)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool on) {
    auto& w = words_[r * words_per_row_ + c / 64];
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    w = on ? (w | bit) : (w & ~bit);
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Tri-state N x N adjacency: each entry is a known 1, a known 0, or unknown.
/// Unknown entries carry value 0 and observed = false. The diagonal is always
/// a known 1. In undirected mode every mutation is mirrored.
class ObservedAdjacency {
 public:
  ObservedAdjacency() = default;
  /// All entries known 0 except the diagonal.
  ObservedAdjacency(std::size_t n, bool undirected);

  std::size_t n() const { return n_; }
  bool undirected() const { return undirected_; }

  bool value(std::size_t i, std::size_t j) const { return values_[i * n_ + j] != 0; }
  bool observed(std::size_t i, std::size_t j) const { return observed_.get(i, j); }

  std::span<const std::uint8_t> row_values(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }

  /// Marks (i, j) as a known positive. Diagonal entries are ignored.
  void set_edge(std::size_t i, std::size_t j);
  /// Marks (i, j) as unknown. Diagonal entries cannot be hidden.
  void set_unknown(std::size_t i, std::size_t j);

  bool fully_observed() const;

  /// Off-diagonal observed positive / negative entry counts (ordered entries).
  std::size_t observed_positive_count() const;
  std::size_t observed_negative_count() const;

  /// Off-diagonal positive pairs: unordered (u < v) when undirected.
  EdgeList positive_pairs() const;

  friend bool operator==(const ObservedAdjacency&, const ObservedAdjacency&) = default;

 private:
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  bool undirected_ = true;
  std::vector<std::uint8_t> values_;
  BitMatrix observed_;
};

struct NodeData {
  std::optional<nn::Matrix> features;
  std::vector<std::optional<std::size_t>> labels;
  /// True where the label is visible to training.
  std::vector<bool> label_mask;
  std::size_t num_classes = 0;

  std::size_t feature_dim() const {
    return features ? static_cast<std::size_t>(features->cols()) : 0;
  }
  bool has_labels() const { return num_classes > 0; }
};

struct LinkSplit {
  ObservedAdjacency train;
  EdgeList val_pos;
  EdgeList val_neg;
  EdgeList test_pos;
  EdgeList test_neg;
  std::uint64_t seed = 0;
};

struct NodeSplit {
  std::vector<std::size_t> train_nodes;
  std::vector<std::size_t> val_nodes;
  std::vector<std::size_t> test_nodes;
  std::uint64_t seed = 0;
};

ObservedAdjacency build_adjacency(std::span<const Edge> edges, std::size_t n,
                                  bool undirected);

struct ParsedEdges {
  EdgeList edges;
  std::size_t n = 0;
};

/// "u v" or "u\tv" per line, '#' comments, blank lines skipped.
ParsedEdges parse_edge_list(std::istream& in);
ParsedEdges read_edge_list(const std::string& path);
/// Writes every off-diagonal positive pair in `parse_edge_list` format.
void write_edge_list(std::ostream& out, const ObservedAdjacency& adj);

/// Dense CSV (one row per node) or sparse "node feat value" triples; the format
/// is detected from the first data line. For triples, missing dimensions are
/// inferred as 1 + the largest index seen.
nn::Matrix parse_features(std::istream& in, std::optional<std::size_t> n_nodes = {},
                          std::optional<std::size_t> n_features = {});
nn::Matrix read_features(const std::string& path, std::optional<std::size_t> n_nodes = {});

struct ParsedLabels {
  std::vector<std::optional<std::size_t>> labels;
  std::size_t num_classes = 0;
};

ParsedLabels parse_labels(std::istream& in, std::size_t n_nodes);
ParsedLabels read_labels(const std::string& path, std::size_t n_nodes);

/// L1-normalizes each row with positive sum; zero rows are left alone.
nn::Matrix row_normalize(const nn::Matrix& features);

/// Holds out floor(test_frac * P) and floor(val_frac * P) positive pairs plus
/// equally many uniformly sampled non-edges, marking all of them unknown in
/// the returned training adjacency.
LinkSplit sample_link_split(const ObservedAdjacency& adj, double test_frac, double val_frac,
                            std::uint64_t seed);

/// Rebuilds a split from held-out pair lists (e.g. a loaded manifest).
LinkSplit apply_link_split(const ObservedAdjacency& adj, EdgeList val_pos, EdgeList val_neg,
                           EdgeList test_pos, EdgeList test_neg, std::uint64_t seed);

NodeSplit sample_node_split(const NodeData& data, std::size_t per_class, std::size_t n_val,
                            std::size_t n_test, std::uint64_t seed);

/// Returns a copy of `data` whose label mask exposes only `split.train_nodes`.
NodeData with_training_labels(const NodeData& data, const NodeSplit& split);

/// 1 - (#observed positives / #observed negatives) over off-diagonal entries,
/// clamped to [0, 1].
double compute_zeta(const ObservedAdjacency& train);

struct AugmentedRow {
  std::vector<double> values;
  std::vector<bool> mask;
};

/// [adjacency row | feature row]; the feature part is never part of the loss.
AugmentedRow augment_row(std::span<const double> adj_row, const std::vector<bool>& adj_mask,
                         std::span<const double> feature_row);

/// Input rows, reconstruction targets and loss masks for a set of nodes.
struct BatchRows {
  nn::Matrix inputs;
  nn::Matrix targets;
  nn::Matrix mask;
};

BatchRows gather_rows(const ObservedAdjacency& adj, const std::optional<nn::Matrix>& features,
                      std::span<const std::size_t> nodes);

nlohmann::json link_split_to_json(const LinkSplit& split);
LinkSplit link_split_from_json(const nlohmann::json& manifest, const ObservedAdjacency& adj);
nlohmann::json node_split_to_json(const NodeSplit& split);
NodeSplit node_split_from_json(const nlohmann::json& manifest, std::size_t n_nodes);

}  // namespace mtgae::graph
