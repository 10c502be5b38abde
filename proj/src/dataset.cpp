#include "mtgae/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace mtgae {

nlohmann::json dataset_to_json(const DatasetPaths& p) {
  nlohmann::json j = {{"edges", p.edges},
                      {"features", p.features},
                      {"labels", p.labels},
                      {"directed", p.directed},
                      {"normalize_features", p.normalize_features}};
  j["num_nodes"] = p.num_nodes ? nlohmann::json(*p.num_nodes) : nlohmann::json(nullptr);
  return j;
}

DatasetPaths dataset_from_json(const nlohmann::json& j) {
  DatasetPaths p;
  p.edges = j.value("edges", "");
  p.features = j.value("features", "");
  p.labels = j.value("labels", "");
  p.directed = j.value("directed", false);
  p.normalize_features = j.value("normalize_features", true);
  if (j.contains("num_nodes") && !j["num_nodes"].is_null()) {
    p.num_nodes = j["num_nodes"].get<std::size_t>();
  }
  return p;
}

Dataset load_dataset(const DatasetPaths& paths) {
  const auto parsed = graph::read_edge_list(paths.edges);

  std::optional<nn::Matrix> features;
  std::size_t n = std::max(parsed.n, paths.num_nodes.value_or(0));
  if (!paths.features.empty()) {
    features = graph::read_features(paths.features, paths.num_nodes);
    n = std::max(n, static_cast<std::size_t>(features->rows()));
    const auto old_rows = features->rows();
    if (static_cast<std::size_t>(old_rows) < n) {
      // Sparse triples may omit trailing all-zero rows.
      features->conservativeResize(static_cast<Eigen::Index>(n), Eigen::NoChange);
      features->bottomRows(static_cast<Eigen::Index>(n) - old_rows).setZero();
    }
    if (paths.normalize_features) {
      features = graph::row_normalize(*features);
    }
  }
  if (paths.num_nodes && n != *paths.num_nodes) {
    throw std::invalid_argument("edge ids exceed the declared node count");
  }

  Dataset data{graph::build_adjacency(parsed.edges, n, !paths.directed), std::move(features), {}};
  if (!paths.labels.empty()) {
    auto labels = graph::read_labels(paths.labels, n);
    graph::NodeData nodes;
    nodes.features = data.features;
    nodes.labels = std::move(labels.labels);
    nodes.label_mask.assign(n, false);
    nodes.num_classes = labels.num_classes;
    data.nodes = std::move(nodes);
  }
  return data;
}

}  // namespace mtgae
