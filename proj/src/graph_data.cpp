#include "mtgae/graph_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "mtgae/errors.hpp"

namespace mtgae::graph {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

std::vector<std::string_view> split_tokens(std::string_view line, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(seps, pos);
    if (start == std::string_view::npos) {
      break;
    }
    const auto end = line.find_first_of(seps, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    pos = end == std::string_view::npos ? line.size() : end;
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

std::size_t parse_index(std::string_view tok, std::size_t line_no) {
  std::size_t value = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("expected a non-negative integer, got '" + std::string(tok) + "'",
                     line_no);
  }
  return value;
}

long long parse_signed(std::string_view tok, std::size_t line_no) {
  long long value = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line_no);
  }
  return value;
}

double parse_real(std::string_view tok, std::size_t line_no) {
  // std::from_chars for double is not available on every toolchain we build with.
  std::string s(tok);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(value)) {
    throw ParseError("expected a finite real, got '" + s + "'", line_no);
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return in;
}

std::size_t holdout_count(double frac, std::size_t total) {
  // Guards against products like 0.29 * 100 = 28.999999999999996.
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(total) + 1e-9));
}

Edge canonical(Edge e, bool undirected) {
  if (undirected && e.u > e.v) {
    std::swap(e.u, e.v);
  }
  return e;
}

}  // namespace

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols, bool fill)
    : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
      words_(rows * ((cols + 63) / 64), fill ? ~std::uint64_t{0} : 0) {
  if (fill && cols % 64 != 0) {
    // Keep padding bits clear so equality compares only real entries.
    const std::uint64_t tail = (std::uint64_t{1} << (cols % 64)) - 1;
    for (std::size_t r = 0; r < rows; ++r) {
      words_[r * words_per_row_ + words_per_row_ - 1] = tail;
    }
  }
}

ObservedAdjacency::ObservedAdjacency(std::size_t n, bool undirected)
    : n_(n), undirected_(undirected), values_(n * n, 0), observed_(n, n, true) {
  for (std::size_t i = 0; i < n; ++i) {
    values_[i * n + i] = 1;
  }
}

void ObservedAdjacency::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) {
    throw std::out_of_range("node index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of range for n = " + std::to_string(n_));
  }
}

void ObservedAdjacency::set_edge(std::size_t i, std::size_t j) {
  check_index(i, j);
  if (i == j) {
    return;
  }
  values_[i * n_ + j] = 1;
  observed_.set(i, j, true);
  if (undirected_) {
    values_[j * n_ + i] = 1;
    observed_.set(j, i, true);
  }
}

void ObservedAdjacency::set_unknown(std::size_t i, std::size_t j) {
  check_index(i, j);
  if (i == j) {
    throw std::invalid_argument("diagonal entries are always observed");
  }
  values_[i * n_ + j] = 0;
  observed_.set(i, j, false);
  if (undirected_) {
    values_[j * n_ + i] = 0;
    observed_.set(j, i, false);
  }
}

bool ObservedAdjacency::fully_observed() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (!observed_.get(i, j)) {
        return false;
      }
    }
  }
  return true;
}

std::size_t ObservedAdjacency::observed_positive_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      count += (i != j && values_[i * n_ + j] != 0 && observed_.get(i, j)) ? 1 : 0;
    }
  }
  return count;
}

std::size_t ObservedAdjacency::observed_negative_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      count += (i != j && values_[i * n_ + j] == 0 && observed_.get(i, j)) ? 1 : 0;
    }
  }
  return count;
}

EdgeList ObservedAdjacency::positive_pairs() const {
  EdgeList out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = undirected_ ? i + 1 : 0; j < n_; ++j) {
      if (i != j && values_[i * n_ + j] != 0) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

ObservedAdjacency build_adjacency(std::span<const Edge> edges, std::size_t n,
                                  bool undirected) {
  ObservedAdjacency adj(n, undirected);
  for (const auto& e : edges) {
    adj.set_edge(e.u, e.v);
  }
  return adj;
}

ParsedEdges parse_edge_list(std::istream& in) {
  ParsedEdges out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (is_skippable(line)) {
      continue;
    }
    const auto tokens = split_tokens(line, " \t");
    if (tokens.size() != 2) {
      throw ParseError("expected 'u v', got '" + std::string(line) + "'", line_no);
    }
    const Edge e{parse_index(tokens[0], line_no), parse_index(tokens[1], line_no)};
    out.n = std::max({out.n, e.u + 1, e.v + 1});
    out.edges.push_back(e);
  }
  if (out.edges.empty()) {
    throw ParseError("edge list is empty", line_no);
  }
  return out;
}

ParsedEdges read_edge_list(const std::string& path) {
  auto in = open_input(path);
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const ObservedAdjacency& adj) {
  for (const auto& e : adj.positive_pairs()) {
    out << e.u << '\t' << e.v << '\n';
  }
}

nn::Matrix parse_features(std::istream& in, std::optional<std::size_t> n_nodes,
                          std::optional<std::size_t> n_features) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  bool has_comma = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (is_skippable(line)) {
      continue;
    }
    has_comma = has_comma || line.find(',') != std::string_view::npos;
    lines.emplace_back(line_no, std::string(line));
  }
  if (lines.empty()) {
    throw ParseError("feature file is empty", line_no);
  }

  const bool triples =
      !has_comma && std::all_of(lines.begin(), lines.end(), [](const auto& l) {
        return split_tokens(l.second, " \t").size() == 3;
      });

  if (!triples) {
    const std::size_t cols = split_csv(lines.front().second).size();
    if (n_nodes && lines.size() != *n_nodes) {
      throw ParseError("expected " + std::to_string(*n_nodes) + " feature rows, found " +
                           std::to_string(lines.size()),
                       lines.back().first);
    }
    if (n_features && cols != *n_features) {
      throw ParseError("expected " + std::to_string(*n_features) + " columns", lines.front().first);
    }
    nn::Matrix x(lines.size(), cols);
    for (std::size_t r = 0; r < lines.size(); ++r) {
      const auto cells = split_csv(lines[r].second);
      if (cells.size() != cols) {
        throw ParseError("inconsistent column count: expected " + std::to_string(cols) +
                             ", got " + std::to_string(cells.size()),
                         lines[r].first);
      }
      for (std::size_t c = 0; c < cols; ++c) {
        x(r, c) = parse_real(cells[c], lines[r].first);
      }
    }
    return x;
  }

  struct Triple {
    std::size_t node, feat;
    double value;
  };
  std::vector<Triple> entries;
  entries.reserve(lines.size());
  std::size_t max_node = 0;
  std::size_t max_feat = 0;
  for (const auto& [no, text] : lines) {
    const auto tok = split_tokens(text, " \t");
    const Triple t{parse_index(tok[0], no), parse_index(tok[1], no), parse_real(tok[2], no)};
    if (n_nodes && t.node >= *n_nodes) {
      throw ParseError("node index " + std::to_string(t.node) + " out of range", no);
    }
    if (n_features && t.feat >= *n_features) {
      throw ParseError("feature index " + std::to_string(t.feat) + " out of range", no);
    }
    max_node = std::max(max_node, t.node);
    max_feat = std::max(max_feat, t.feat);
    entries.push_back(t);
  }
  nn::Matrix x = nn::Matrix::Zero(n_nodes.value_or(max_node + 1), n_features.value_or(max_feat + 1));
  for (const auto& t : entries) {
    x(t.node, t.feat) = t.value;
  }
  return x;
}

nn::Matrix read_features(const std::string& path, std::optional<std::size_t> n_nodes) {
  auto in = open_input(path);
  return parse_features(in, n_nodes);
}

ParsedLabels parse_labels(std::istream& in, std::size_t n_nodes) {
  ParsedLabels out;
  out.labels.assign(n_nodes, std::nullopt);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (is_skippable(line)) {
      continue;
    }
    const auto tok = split_tokens(line, " \t");
    if (tok.size() != 2) {
      throw ParseError("expected 'node class', got '" + std::string(line) + "'", line_no);
    }
    const auto node = parse_index(tok[0], line_no);
    const auto cls = parse_signed(tok[1], line_no);
    if (node >= n_nodes) {
      throw ParseError("node " + std::to_string(node) + " out of range for " +
                           std::to_string(n_nodes) + " nodes",
                       line_no);
    }
    if (cls < 0) {
      throw ParseError("negative class id", line_no);
    }
    const auto c = static_cast<std::size_t>(cls);
    if (out.labels[node] && *out.labels[node] != c) {
      throw ParseError("conflicting labels for node " + std::to_string(node), line_no);
    }
    out.labels[node] = c;
    out.num_classes = std::max(out.num_classes, c + 1);
  }
  return out;
}

ParsedLabels read_labels(const std::string& path, std::size_t n_nodes) {
  auto in = open_input(path);
  return parse_labels(in, n_nodes);
}

nn::Matrix row_normalize(const nn::Matrix& features) {
  if ((features.array() < 0.0).any()) {
    throw std::invalid_argument("row_normalize: features must be non-negative");
  }
  nn::Matrix out = features;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double sum = out.row(r).sum();
    if (sum > 0.0) {
      out.row(r) /= sum;
    }
  }
  return out;
}

LinkSplit apply_link_split(const ObservedAdjacency& adj, EdgeList val_pos, EdgeList val_neg,
                           EdgeList test_pos, EdgeList test_neg, std::uint64_t seed) {
  LinkSplit split{adj, std::move(val_pos), std::move(val_neg), std::move(test_pos),
                  std::move(test_neg), seed};
  for (const EdgeList* list : {&split.val_pos, &split.val_neg, &split.test_pos, &split.test_neg}) {
    for (const auto& e : *list) {
      split.train.set_unknown(e.u, e.v);
    }
  }
  return split;
}

LinkSplit sample_link_split(const ObservedAdjacency& adj, double test_frac, double val_frac,
                            std::uint64_t seed) {
  if (!(test_frac >= 0.0 && val_frac >= 0.0 && test_frac + val_frac > 0.0 &&
        test_frac + val_frac < 1.0)) {
    throw std::invalid_argument("split fractions must satisfy 0 < test + val < 1");
  }
  if (!adj.fully_observed()) {
    throw std::invalid_argument("sample_link_split needs a fully observed adjacency");
  }
  const std::size_t n = adj.n();
  const bool undirected = adj.undirected();

  nn::RngStream base(seed);
  auto pos_rng = base.fork(0);
  auto neg_rng = base.fork(1);

  EdgeList positives = adj.positive_pairs();
  const std::size_t n_test = holdout_count(test_frac, positives.size());
  const std::size_t n_val = holdout_count(val_frac, positives.size());
  nn::shuffle(std::span<Edge>(positives), pos_rng);

  const std::size_t needed = n_test + n_val;
  const std::size_t total_pairs = undirected ? n * (n - 1) / 2 : n * (n - 1);
  const std::size_t available = total_pairs - positives.size();
  if (needed > available) {
    throw std::invalid_argument("not enough non-edges to sample " + std::to_string(needed) +
                                " negatives");
  }

  EdgeList negatives;
  negatives.reserve(needed);
  if (available <= 4 * needed) {
    // Dense graph: enumerate every non-edge and take a random prefix.
    EdgeList pool;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = undirected ? i + 1 : 0; j < n; ++j) {
        if (i != j && !adj.value(i, j)) {
          pool.push_back({i, j});
        }
      }
    }
    nn::shuffle(std::span<Edge>(pool), neg_rng);
    negatives.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(needed));
  } else {
    std::unordered_set<std::size_t> taken;
    while (negatives.size() < needed) {
      const auto i = static_cast<std::size_t>(neg_rng.below(n));
      const auto j = static_cast<std::size_t>(neg_rng.below(n));
      if (i == j || adj.value(i, j)) {
        continue;
      }
      const Edge e = canonical({i, j}, undirected);
      if (taken.insert(e.u * n + e.v).second) {
        negatives.push_back(e);
      }
    }
  }

  const auto pos_begin = positives.begin();
  const auto neg_begin = negatives.begin();
  const auto t = static_cast<std::ptrdiff_t>(n_test);
  const auto v = static_cast<std::ptrdiff_t>(n_val);
  return apply_link_split(adj, EdgeList(pos_begin + t, pos_begin + t + v),
                          EdgeList(neg_begin + t, neg_begin + t + v), EdgeList(pos_begin, pos_begin + t),
                          EdgeList(neg_begin, neg_begin + t), seed);
}

NodeSplit sample_node_split(const NodeData& data, std::size_t per_class, std::size_t n_val,
                            std::size_t n_test, std::uint64_t seed) {
  if (!data.has_labels()) {
    throw std::invalid_argument("sample_node_split needs labels");
  }
  nn::RngStream base(seed);
  auto class_rng = base.fork(2);
  auto rest_rng = base.fork(3);

  std::vector<std::vector<std::size_t>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i]) {
      by_class[*data.labels[i]].push_back(i);
    }
  }

  NodeSplit split;
  split.seed = seed;
  std::vector<std::size_t> rest;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < per_class) {
      throw std::invalid_argument("insufficient labeled nodes: class " + std::to_string(c) +
                                  " has " + std::to_string(members.size()) + ", need " +
                                  std::to_string(per_class));
    }
    nn::shuffle(std::span<std::size_t>(members), class_rng);
    const std::size_t take = per_class;
    split.train_nodes.insert(split.train_nodes.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(take));
    rest.insert(rest.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  if (rest.size() < n_val + n_test) {
    throw std::invalid_argument("insufficient labeled nodes: need " +
                                std::to_string(n_val + n_test) + " beyond the training set, have " +
                                std::to_string(rest.size()));
  }
  std::sort(rest.begin(), rest.end());
  nn::shuffle(std::span<std::size_t>(rest), rest_rng);
  const auto v = static_cast<std::ptrdiff_t>(n_val);
  const auto t = static_cast<std::ptrdiff_t>(n_test);
  split.val_nodes.assign(rest.begin(), rest.begin() + v);
  split.test_nodes.assign(rest.begin() + v, rest.begin() + v + t);

  std::sort(split.train_nodes.begin(), split.train_nodes.end());
  std::sort(split.val_nodes.begin(), split.val_nodes.end());
  std::sort(split.test_nodes.begin(), split.test_nodes.end());
  return split;
}

NodeData with_training_labels(const NodeData& data, const NodeSplit& split) {
  NodeData out = data;
  out.label_mask.assign(data.labels.size(), false);
  for (const auto i : split.train_nodes) {
    if (i >= data.labels.size() || !data.labels[i]) {
      throw std::invalid_argument("training node " + std::to_string(i) + " has no label");
    }
    out.label_mask[i] = true;
  }
  return out;
}

double compute_zeta(const ObservedAdjacency& train) {
  const auto neg = train.observed_negative_count();
  if (neg == 0) {
    throw std::domain_error("compute_zeta: no observed negative entries");
  }
  const double pos = static_cast<double>(train.observed_positive_count());
  return std::clamp(1.0 - pos / static_cast<double>(neg), 0.0, 1.0);
}

AugmentedRow augment_row(std::span<const double> adj_row, const std::vector<bool>& adj_mask,
                         std::span<const double> feature_row) {
  if (adj_row.size() != adj_mask.size()) {
    throw std::invalid_argument("augment_row: adjacency row and mask differ in length");
  }
  AugmentedRow out;
  out.values.reserve(adj_row.size() + feature_row.size());
  out.values.assign(adj_row.begin(), adj_row.end());
  out.values.insert(out.values.end(), feature_row.begin(), feature_row.end());
  out.mask = adj_mask;
  out.mask.resize(adj_row.size() + feature_row.size(), false);
  return out;
}

BatchRows gather_rows(const ObservedAdjacency& adj, const std::optional<nn::Matrix>& features,
                      std::span<const std::size_t> nodes) {
  const std::size_t n = adj.n();
  const std::size_t f = features ? static_cast<std::size_t>(features->cols()) : 0;
  if (features && static_cast<std::size_t>(features->rows()) != n) {
    throw std::invalid_argument("feature rows do not match node count");
  }
  const auto b = static_cast<Eigen::Index>(nodes.size());
  const auto width = static_cast<Eigen::Index>(n + f);
  BatchRows rows{nn::Matrix(b, width), nn::Matrix::Zero(b, width), nn::Matrix::Zero(b, width)};
  for (Eigen::Index r = 0; r < b; ++r) {
    const std::size_t i = nodes[static_cast<std::size_t>(r)];
    if (i >= n) {
      throw std::out_of_range("node " + std::to_string(i) + " out of range");
    }
    const auto values = adj.row_values(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = values[j];
      const auto c = static_cast<Eigen::Index>(j);
      rows.inputs(r, c) = a;
      rows.targets(r, c) = a;
      rows.mask(r, c) = adj.observed(i, j) ? 1.0 : 0.0;
    }
    if (f > 0) {
      rows.inputs.block(r, static_cast<Eigen::Index>(n), 1, static_cast<Eigen::Index>(f)) =
          features->row(static_cast<Eigen::Index>(i));
    }
  }
  return rows;
}

namespace {

nlohmann::json edges_to_json(const EdgeList& edges) {
  auto arr = nlohmann::json::array();
  for (const auto& e : edges) {
    arr.push_back({e.u, e.v});
  }
  return arr;
}

EdgeList edges_from_json(const nlohmann::json& arr, const char* key, std::size_t n) {
  if (!arr.is_array()) {
    throw ArtifactError(std::string("manifest field '") + key + "' is not an array");
  }
  EdgeList out;
  out.reserve(arr.size());
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ArtifactError(std::string("manifest field '") + key + "' holds a non-pair");
    }
    const Edge e{pair[0].get<std::size_t>(), pair[1].get<std::size_t>()};
    if (e.u >= n || e.v >= n || e.u == e.v) {
      throw ArtifactError(std::string("manifest field '") + key + "' has an invalid pair");
    }
    out.push_back(e);
  }
  return out;
}

std::vector<std::size_t> nodes_from_json(const nlohmann::json& arr, const char* key,
                                         std::size_t n) {
  if (!arr.is_array()) {
    throw ArtifactError(std::string("node split field '") + key + "' is not an array");
  }
  auto out = arr.get<std::vector<std::size_t>>();
  for (const auto i : out) {
    if (i >= n) {
      throw ArtifactError(std::string("node split field '") + key + "' is out of range");
    }
  }
  return out;
}

}  // namespace

nlohmann::json link_split_to_json(const LinkSplit& split) {
  return {{"val_pos", edges_to_json(split.val_pos)},
          {"val_neg", edges_to_json(split.val_neg)},
          {"test_pos", edges_to_json(split.test_pos)},
          {"test_neg", edges_to_json(split.test_neg)},
          {"seed", split.seed}};
}

LinkSplit link_split_from_json(const nlohmann::json& manifest, const ObservedAdjacency& adj) {
  try {
    const std::size_t n = adj.n();
    auto val_pos = edges_from_json(manifest.at("val_pos"), "val_pos", n);
    auto val_neg = edges_from_json(manifest.at("val_neg"), "val_neg", n);
    auto test_pos = edges_from_json(manifest.at("test_pos"), "test_pos", n);
    auto test_neg = edges_from_json(manifest.at("test_neg"), "test_neg", n);
    for (const auto* list : {&val_pos, &test_pos}) {
      for (const auto& e : *list) {
        if (!adj.value(e.u, e.v)) {
          throw ArtifactError("manifest positive pair is not an edge of the graph");
        }
      }
    }
    for (const auto* list : {&val_neg, &test_neg}) {
      for (const auto& e : *list) {
        if (adj.value(e.u, e.v)) {
          throw ArtifactError("manifest negative pair is an edge of the graph");
        }
      }
    }
    return apply_link_split(adj, std::move(val_pos), std::move(val_neg), std::move(test_pos),
                            std::move(test_neg), manifest.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("malformed split manifest: ") + e.what());
  }
}

nlohmann::json node_split_to_json(const NodeSplit& split) {
  return {{"train_nodes", split.train_nodes},
          {"val_nodes", split.val_nodes},
          {"test_nodes", split.test_nodes},
          {"seed", split.seed}};
}

NodeSplit node_split_from_json(const nlohmann::json& manifest, std::size_t n_nodes) {
  try {
    NodeSplit split;
    split.train_nodes = nodes_from_json(manifest.at("train_nodes"), "train_nodes", n_nodes);
    split.val_nodes = nodes_from_json(manifest.at("val_nodes"), "val_nodes", n_nodes);
    split.test_nodes = nodes_from_json(manifest.at("test_nodes"), "test_nodes", n_nodes);
    split.seed = manifest.at("seed").get<std::uint64_t>();
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("malformed node split: ") + e.what());
  }
}

}  // namespace mtgae::graph
