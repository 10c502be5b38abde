#include "mtgae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mtgae::metrics {

namespace {

void check_sizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  if (std::any_of(scores.begin(), scores.end(), [](double s) { return std::isnan(s); })) {
    throw std::invalid_argument("scores must not be NaN");
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores, labels);
  const auto n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto n_neg = static_cast<double>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc needs at least one positive and one negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk tie groups in ascending score order. Each positive beats every
  // negative strictly below it and ties half of those in its own group.
  double concordant = 0.0;
  double negatives_below = 0.0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    double group_pos = 0.0;
    double group_neg = 0.0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (labels[order[end]] == 1 ? group_pos : group_neg) += 1.0;
      ++end;
    }
    concordant += group_pos * (negatives_below + 0.5 * group_neg);
    negatives_below += group_neg;
    start = end;
  }
  return concordant / (n_pos * n_neg);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores, labels);
  const auto n_pos = std::count(labels.begin(), labels.end(), 1);
  if (n_pos == 0) {
    throw std::invalid_argument("average_precision needs at least one positive");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0;
  double total = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      hits += 1.0;
      total += hits / static_cast<double>(rank + 1);
    }
  }
  return total / static_cast<double>(n_pos);
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw std::invalid_argument("accuracy needs equally sized, non-empty inputs");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    correct += predicted[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("argmax of an empty range");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

std::vector<std::pair<std::size_t, double>> precision_at_k(std::span<const int> ranked_relevance,
                                                           std::span<const std::size_t> ks) {
  std::vector<std::pair<std::size_t, double>> curve;
  curve.reserve(ks.size());
  std::vector<std::size_t> hits_upto(ranked_relevance.size() + 1, 0);
  for (std::size_t i = 0; i < ranked_relevance.size(); ++i) {
    hits_upto[i + 1] = hits_upto[i] + (ranked_relevance[i] != 0 ? 1 : 0);
  }
  for (const auto k : ks) {
    if (k == 0 || k > ranked_relevance.size()) {
      throw std::invalid_argument("k = " + std::to_string(k) + " outside 1.." +
                                  std::to_string(ranked_relevance.size()));
    }
    curve.emplace_back(k, static_cast<double>(hits_upto[k]) / static_cast<double>(k));
  }
  return curve;
}

}  // namespace mtgae::metrics
