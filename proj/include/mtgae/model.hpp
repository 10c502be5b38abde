#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtgae/nn.hpp"

namespace mtgae::model {

struct ModelDims {
  std::size_t input_dim = 0;  ///< N, or N + F when features are appended
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 128;
  std::size_t num_classes = 0;  ///< 0 disables the classification head

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Tied autoencoder parameters. The decoder owns no weight matrices: its first
/// layer multiplies by W^T and its output layer by V^T. U and b5 form the
/// classification head and are empty when num_classes == 0.
struct ModelParams {
  nn::Matrix V;       ///< hidden1 x input_dim
  nn::RowVector b1;   ///< hidden1
  nn::Matrix W;       ///< hidden2 x hidden1
  nn::RowVector b2;   ///< hidden2
  nn::RowVector b3;   ///< hidden1
  nn::RowVector b4;   ///< input_dim
  nn::Matrix U;       ///< num_classes x hidden1
  nn::RowVector b5;   ///< num_classes

  /// Bumped whenever mutable blocks are handed out; forward caches remember
  /// it so backward can reject a cache computed before an update.
  std::uint64_t generation = 0;

  static ModelParams zeros(const ModelDims& dims);
  /// Glorot-uniform weights, zero biases.
  static ModelParams glorot(const ModelDims& dims, nn::RngStream& rng);

  ModelDims dims() const;
  bool has_classifier() const { return U.rows() > 0; }

  /// Blocks in checkpoint order: V, b1, W, b2, b3, b4, U, b5.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  std::vector<std::size_t> block_sizes() const;

  /// Stored weight-matrix entries: H1*M + H2*H1 (+ C*H1).
  std::size_t weight_count() const;
  std::size_t parameter_count() const;
};

/// Same shapes as the parameters they differentiate.
using Gradients = ModelParams;

/// Per-sample inputs of the loss for one batch.
struct LossInputs {
  nn::Matrix targets;  ///< B x M, entries in {0, 1}
  nn::Matrix mask;     ///< B x M, 1 where the entry is observed
  double zeta = 1.0;
  /// One entry per batch row; nullopt where the label is hidden or absent.
  std::vector<std::optional<std::size_t>> labels;
};

struct ForwardCache {
  nn::Matrix dropout_mask;  ///< multiplier applied to the input row
  nn::Matrix input;         ///< input after dropout
  nn::Matrix pre1, act1, h1;
  nn::Matrix pre2, act2, z;
  nn::Matrix pre3, act3, d;
  const ModelParams* owner = nullptr;
  std::uint64_t generation = 0;
};

struct ForwardResult {
  nn::Matrix recon_logits;  ///< B x M, linear decoder output
  nn::Matrix class_logits;  ///< B x C, empty without a head
  ForwardCache cache;
};

/// h1 = MVN(ReLU(V a + b1)), z = MVN(ReLU(W h1 + b2)), d = MVN(ReLU(W^T z + b3)),
/// recon = V^T d + b4, class = U d + b5. With training set, inverted dropout at
/// `dropout_rate` is applied to the input row.
ForwardResult forward(const ModelParams& params, const nn::Matrix& batch, bool training,
                      double dropout_rate, nn::RngStream& rng);
/// Inference-mode forward; consumes no randomness.
ForwardResult forward(const ModelParams& params, const nn::Matrix& batch);

/// Mean weighted BCE over entries with mask 1; 0 when no entry is observed.
double mbce_loss(const nn::Matrix& recon_logits, const nn::Matrix& targets,
                 const nn::Matrix& mask, double zeta);
nn::Matrix mbce_grad(const nn::Matrix& recon_logits, const nn::Matrix& targets,
                     const nn::Matrix& mask, double zeta);

/// Mean of -log softmax(logits)[label] over labeled rows; 0 when none are labeled.
double masked_ce_loss(const nn::Matrix& class_logits,
                      std::span<const std::optional<std::size_t>> labels);
nn::Matrix masked_ce_grad(const nn::Matrix& class_logits,
                          std::span<const std::optional<std::size_t>> labels);

/// masked_ce_loss + mbce_loss. Without a head (empty class logits) only MBCE counts.
double multitask_loss(const ForwardResult& fwd, const LossInputs& loss);

/// Exact gradient of multitask_loss. V and W gradients sum their encoder and
/// decoder contributions. Throws std::logic_error for a cache that does not
/// belong to `params` in its current state.
Gradients backward(const ModelParams& params, const ForwardResult& fwd, const LossInputs& loss);

/// Inference-mode sigmoid(recon logits).
nn::Matrix predict_links(const ModelParams& params, const nn::Matrix& rows);
/// Inference-mode softmax(class logits). Throws std::logic_error without a head.
nn::Matrix predict_nodes(const ModelParams& params, const nn::Matrix& rows);

/// Reconstruction probabilities for a subset of nodes, addressable by node id.
class LinkScorer {
 public:
  /// `rows` holds the model inputs of `nodes`, in the same order.
  LinkScorer(const ModelParams& params, const nn::Matrix& rows,
             std::span<const std::size_t> nodes, std::size_t n_nodes, bool undirected);

  /// sigmoid(recon[i][j]); row i must be among the scored nodes.
  double probability(std::size_t i, std::size_t j) const;
  /// Undirected: mean of both directed probabilities. Directed: probability(i, j).
  double score_pair(std::size_t i, std::size_t j) const;

 private:
  nn::Matrix probs_;
  std::vector<std::size_t> row_of_;
  bool undirected_;
};

double score_pair(const nn::Matrix& recon_probs, std::size_t i, std::size_t j, bool undirected);

struct GradientCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_block = 0;
  std::size_t worst_index = 0;
};

/// Compares `analytic` with central differences of multitask_loss (dropout
/// off). Per-entry error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheckResult gradient_check(const ModelParams& params, const nn::Matrix& batch,
                                   const LossInputs& loss, const Gradients& analytic,
                                   double h = 1e-5);
/// Same, with the analytic gradient from backward().
GradientCheckResult gradient_check(const ModelParams& params, const nn::Matrix& batch,
                                   const LossInputs& loss, double h = 1e-5);

struct Checkpoint {
  ModelParams params;
  double zeta = 1.0;
  nlohmann::json config;
};

/// One JSON header line {"format", "dims": [M, H1, H2, C], "zeta", "config"}
/// followed by little-endian float64 blocks in ModelParams::blocks() order.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws ArtifactError on a malformed, truncated or oversized file.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mtgae::model
