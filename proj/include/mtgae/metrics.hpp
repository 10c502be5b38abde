#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mtgae::metrics {

/// Area under the ROC curve in Mann-Whitney form: (concordant pairs + 0.5 * tied
/// pairs) / (#pos * #neg). Throws std::invalid_argument unless both classes occur
/// or when a score is NaN.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Mean precision at the rank of each positive, scores sorted descending with
/// ties kept in input order. Throws std::invalid_argument without positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);

inline double combined_lp(double auc_value, double ap_value) { return 0.5 * (auc_value + ap_value); }

/// Fraction of correct predictions; throws on empty input.
double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

/// precision@k for each k over a ranking of relevance flags (best first).
/// Throws std::invalid_argument when some k is 0 or exceeds the ranking length.
std::vector<std::pair<std::size_t, double>> precision_at_k(std::span<const int> ranked_relevance,
                                                           std::span<const std::size_t> ks);

}  // namespace mtgae::metrics
