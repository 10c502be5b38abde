#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mtgae/graph_data.hpp"

namespace mtgae {

struct DatasetPaths {
  std::string edges;
  std::string features;  ///< empty: no side information
  std::string labels;    ///< empty: unlabeled
  bool directed = false;
  bool normalize_features = true;
  /// Forces N; otherwise N = max(1 + largest edge id, feature rows).
  std::optional<std::size_t> num_nodes;
};

nlohmann::json dataset_to_json(const DatasetPaths& paths);
DatasetPaths dataset_from_json(const nlohmann::json& j);

struct Dataset {
  graph::ObservedAdjacency full;
  std::optional<nn::Matrix> features;
  std::optional<graph::NodeData> nodes;

  std::size_t n() const { return full.n(); }
};

Dataset load_dataset(const DatasetPaths& paths);

}  // namespace mtgae
