#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mtgae/rng.hpp"

namespace mtgae::nn {

/// Dense row-major matrix. Rows are examples (nodes) throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Bias vectors are rows so they broadcast across a batch with `rowwise()`.
using RowVector = Eigen::RowVectorXd;

/// Glorot/Xavier uniform init: entries i.i.d. U[-L, L], L = sqrt(6 / (fan_in + fan_out)).
/// The result is fan_out x fan_in, i.e. it maps fan_in inputs to fan_out outputs.
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream& rng);

double glorot_limit(std::size_t fan_in, std::size_t fan_out);

Matrix relu(const Matrix& x);
/// Indicator of x > 0; the derivative at exactly 0 is taken as 0.
Matrix relu_grad(const Matrix& x);

inline constexpr double kMvnEps = 1e-6;

/// Per-row mean-variance normalization with population variance:
/// (x - mean) / sqrt(var + eps).
Matrix mvn(const Matrix& x, double eps = kMvnEps);

/// Vector-Jacobian product of `mvn` at `x` for upstream gradient `dy`.
Matrix mvn_backward(const Matrix& x, const Matrix& dy, double eps = kMvnEps);

struct DropoutResult {
  Matrix output;
  /// Multiplier applied to each entry: 0 for dropped entries, 1 / (1 - rate)
  /// for kept ones; all ones at inference.
  Matrix mask;
};

/// Inverted dropout. At inference (or rate 0) the input passes through
/// unchanged and no random numbers are consumed.
DropoutResult dropout(const Matrix& x, double rate, RngStream& rng, bool training);

double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

RowVector softmax(const RowVector& logits);
Matrix softmax_rows(const Matrix& logits);
RowVector log_softmax(const RowVector& logits);

/// Balanced BCE on a logit: positives are weighted by zeta, negatives by 1.
/// Evaluated in log space so that large-magnitude logits stay finite.
double weighted_bce_from_logits(double logit, double target, double zeta);
/// d/d(logit) of weighted_bce_from_logits.
double weighted_bce_grad(double logit, double target, double zeta);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators, one block per parameter block.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const std::size_t> block_sizes);
};

/// One bias-corrected Adam step over every block. Throws std::invalid_argument
/// when block counts or sizes disagree with the state.
void adam_update(std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, AdamState& state);

}  // namespace mtgae::nn
