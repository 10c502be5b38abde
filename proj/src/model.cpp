#include "mtgae/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtgae::model {

namespace {

std::span<double> span_of(nn::Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(nn::RowVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> span_of(const nn::Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> span_of(const nn::RowVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void add_bias(nn::Matrix& x, const nn::RowVector& b) { x.rowwise() += b; }

}  // namespace

ModelParams ModelParams::zeros(const ModelDims& dims) {
  if (dims.input_dim == 0 || dims.hidden1 == 0 || dims.hidden2 == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (dims.num_classes == 1) {
    throw std::invalid_argument("a classification head needs at least 2 classes");
  }
  const auto m = static_cast<Eigen::Index>(dims.input_dim);
  const auto h1 = static_cast<Eigen::Index>(dims.hidden1);
  const auto h2 = static_cast<Eigen::Index>(dims.hidden2);
  const auto c = static_cast<Eigen::Index>(dims.num_classes);
  ModelParams p;
  p.V = nn::Matrix::Zero(h1, m);
  p.b1 = nn::RowVector::Zero(h1);
  p.W = nn::Matrix::Zero(h2, h1);
  p.b2 = nn::RowVector::Zero(h2);
  p.b3 = nn::RowVector::Zero(h1);
  p.b4 = nn::RowVector::Zero(m);
  p.U = nn::Matrix::Zero(c, h1);
  p.b5 = nn::RowVector::Zero(c);
  return p;
}

ModelParams ModelParams::glorot(const ModelDims& dims, nn::RngStream& rng) {
  ModelParams p = zeros(dims);
  p.V = nn::glorot_uniform(dims.input_dim, dims.hidden1, rng);
  p.W = nn::glorot_uniform(dims.hidden1, dims.hidden2, rng);
  if (dims.num_classes > 0) {
    p.U = nn::glorot_uniform(dims.hidden1, dims.num_classes, rng);
  }
  return p;
}

ModelDims ModelParams::dims() const {
  return {static_cast<std::size_t>(V.cols()), static_cast<std::size_t>(V.rows()),
          static_cast<std::size_t>(W.rows()), static_cast<std::size_t>(U.rows())};
}

std::vector<std::span<double>> ModelParams::blocks() {
  ++generation;
  return {span_of(V), span_of(b1), span_of(W), span_of(b2),
          span_of(b3), span_of(b4), span_of(U), span_of(b5)};
}

std::vector<std::span<const double>> ModelParams::blocks() const {
  return {span_of(V), span_of(b1), span_of(W), span_of(b2),
          span_of(b3), span_of(b4), span_of(U), span_of(b5)};
}

std::vector<std::size_t> ModelParams::block_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto b : blocks()) {
    sizes.push_back(b.size());
  }
  return sizes;
}

std::size_t ModelParams::weight_count() const {
  return static_cast<std::size_t>(V.size() + W.size() + U.size());
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto s : block_sizes()) {
    total += s;
  }
  return total;
}

ForwardResult forward(const ModelParams& p, const nn::Matrix& batch, bool training,
                      double dropout_rate, nn::RngStream& rng) {
  if (batch.cols() != p.V.cols()) {
    throw std::invalid_argument("forward: batch width " + std::to_string(batch.cols()) +
                                " does not match model input " + std::to_string(p.V.cols()));
  }
  ForwardResult r;
  auto& c = r.cache;
  if (training && dropout_rate > 0.0) {
    auto dropped = nn::dropout(batch, dropout_rate, rng, true);
    c.input = std::move(dropped.output);
    c.dropout_mask = std::move(dropped.mask);
  } else {
    // Identity mask is implied by an empty dropout_mask.
    c.input = batch;
  }

  c.pre1.noalias() = c.input * p.V.transpose();
  add_bias(c.pre1, p.b1);
  c.act1 = nn::relu(c.pre1);
  c.h1 = nn::mvn(c.act1);

  c.pre2.noalias() = c.h1 * p.W.transpose();
  add_bias(c.pre2, p.b2);
  c.act2 = nn::relu(c.pre2);
  c.z = nn::mvn(c.act2);

  c.pre3.noalias() = c.z * p.W;
  add_bias(c.pre3, p.b3);
  c.act3 = nn::relu(c.pre3);
  c.d = nn::mvn(c.act3);

  r.recon_logits.noalias() = c.d * p.V;
  add_bias(r.recon_logits, p.b4);
  if (p.has_classifier()) {
    r.class_logits.noalias() = c.d * p.U.transpose();
    add_bias(r.class_logits, p.b5);
  }
  c.owner = &p;
  c.generation = p.generation;
  return r;
}

ForwardResult forward(const ModelParams& params, const nn::Matrix& batch) {
  nn::RngStream unused(0);
  return forward(params, batch, false, 0.0, unused);
}

double mbce_loss(const nn::Matrix& recon_logits, const nn::Matrix& targets,
                 const nn::Matrix& mask, double zeta) {
  if (recon_logits.rows() != targets.rows() || recon_logits.cols() != targets.cols() ||
      mask.rows() != targets.rows() || mask.cols() != targets.cols()) {
    throw std::invalid_argument("mbce_loss: shape mismatch");
  }
  double total = 0.0;
  double count = 0.0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const double m = mask.data()[i];
    if (m != 0.0) {
      total += m * nn::weighted_bce_from_logits(recon_logits.data()[i], targets.data()[i], zeta);
      count += m;
    }
  }
  return count > 0.0 ? total / count : 0.0;
}

nn::Matrix mbce_grad(const nn::Matrix& recon_logits, const nn::Matrix& targets,
                     const nn::Matrix& mask, double zeta) {
  nn::Matrix g = nn::Matrix::Zero(recon_logits.rows(), recon_logits.cols());
  const double count = mask.sum();
  if (count <= 0.0) {
    return g;
  }
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const double m = mask.data()[i];
    if (m != 0.0) {
      g.data()[i] = m * nn::weighted_bce_grad(recon_logits.data()[i], targets.data()[i], zeta) / count;
    }
  }
  return g;
}

namespace {

std::size_t checked_label(const std::optional<std::size_t>& label, Eigen::Index classes) {
  if (*label >= static_cast<std::size_t>(classes)) {
    throw std::invalid_argument("label " + std::to_string(*label) + " out of range for " +
                                std::to_string(classes) + " classes");
  }
  return *label;
}

void check_label_rows(const nn::Matrix& class_logits,
                      std::span<const std::optional<std::size_t>> labels) {
  if (static_cast<std::size_t>(class_logits.rows()) != labels.size()) {
    throw std::invalid_argument("label count does not match batch rows");
  }
}

}  // namespace

double masked_ce_loss(const nn::Matrix& class_logits,
                      std::span<const std::optional<std::size_t>> labels) {
  check_label_rows(class_logits, labels);
  double total = 0.0;
  std::size_t labeled = 0;
  for (Eigen::Index r = 0; r < class_logits.rows(); ++r) {
    const auto& label = labels[static_cast<std::size_t>(r)];
    if (!label) {
      continue;
    }
    const auto c = checked_label(label, class_logits.cols());
    total -= nn::log_softmax(class_logits.row(r))(static_cast<Eigen::Index>(c));
    ++labeled;
  }
  return labeled > 0 ? total / static_cast<double>(labeled) : 0.0;
}

nn::Matrix masked_ce_grad(const nn::Matrix& class_logits,
                          std::span<const std::optional<std::size_t>> labels) {
  check_label_rows(class_logits, labels);
  nn::Matrix g = nn::Matrix::Zero(class_logits.rows(), class_logits.cols());
  const auto labeled = std::count_if(labels.begin(), labels.end(),
                                     [](const auto& l) { return l.has_value(); });
  if (labeled == 0) {
    return g;
  }
  for (Eigen::Index r = 0; r < class_logits.rows(); ++r) {
    const auto& label = labels[static_cast<std::size_t>(r)];
    if (!label) {
      continue;
    }
    const auto c = static_cast<Eigen::Index>(checked_label(label, class_logits.cols()));
    g.row(r) = nn::softmax(class_logits.row(r));
    g(r, c) -= 1.0;
    g.row(r) /= static_cast<double>(labeled);
  }
  return g;
}

double multitask_loss(const ForwardResult& fwd, const LossInputs& loss) {
  double total = mbce_loss(fwd.recon_logits, loss.targets, loss.mask, loss.zeta);
  if (fwd.class_logits.cols() > 0) {
    total += masked_ce_loss(fwd.class_logits, loss.labels);
  }
  return total;
}

Gradients backward(const ModelParams& p, const ForwardResult& fwd, const LossInputs& loss) {
  const auto& c = fwd.cache;
  if (c.owner != &p || c.generation != p.generation) {
    throw std::logic_error("backward: forward cache does not match the current parameters");
  }
  if (loss.targets.rows() != fwd.recon_logits.rows() ||
      loss.targets.cols() != fwd.recon_logits.cols()) {
    throw std::invalid_argument("backward: loss targets do not match the forward batch");
  }

  Gradients g;
  const nn::Matrix d_recon = mbce_grad(fwd.recon_logits, loss.targets, loss.mask, loss.zeta);
  g.b4 = d_recon.colwise().sum();
  // Decoder use of V: recon = d V.
  g.V.noalias() = c.d.transpose() * d_recon;
  nn::Matrix dd = d_recon * p.V.transpose();

  if (p.has_classifier()) {
    const nn::Matrix d_class = masked_ce_grad(fwd.class_logits, loss.labels);
    g.U.noalias() = d_class.transpose() * c.d;
    g.b5 = d_class.colwise().sum();
    dd.noalias() += d_class * p.U;
  } else {
    g.U = nn::Matrix::Zero(p.U.rows(), p.U.cols());
    g.b5 = nn::RowVector::Zero(p.b5.size());
  }

  const nn::Matrix dp3 = nn::mvn_backward(c.act3, dd).cwiseProduct(nn::relu_grad(c.pre3));
  g.b3 = dp3.colwise().sum();
  // Decoder use of W: pre3 = z W.
  g.W.noalias() = c.z.transpose() * dp3;
  const nn::Matrix dz = dp3 * p.W.transpose();

  const nn::Matrix dp2 = nn::mvn_backward(c.act2, dz).cwiseProduct(nn::relu_grad(c.pre2));
  g.b2 = dp2.colwise().sum();
  // Encoder use of W: pre2 = h1 W^T.
  g.W.noalias() += dp2.transpose() * c.h1;
  const nn::Matrix dh1 = dp2 * p.W;

  const nn::Matrix dp1 = nn::mvn_backward(c.act1, dh1).cwiseProduct(nn::relu_grad(c.pre1));
  g.b1 = dp1.colwise().sum();
  // Encoder use of V: pre1 = input V^T.
  g.V.noalias() += dp1.transpose() * c.input;
  return g;
}

nn::Matrix predict_links(const ModelParams& params, const nn::Matrix& rows) {
  nn::Matrix logits = forward(params, rows).recon_logits;
  return logits.unaryExpr([](double x) { return nn::sigmoid(x); });
}

nn::Matrix predict_nodes(const ModelParams& params, const nn::Matrix& rows) {
  if (!params.has_classifier()) {
    throw std::logic_error("predict_nodes: model has no classification head");
  }
  return nn::softmax_rows(forward(params, rows).class_logits);
}

double score_pair(const nn::Matrix& recon_probs, std::size_t i, std::size_t j, bool undirected) {
  const auto n = static_cast<std::size_t>(recon_probs.rows());
  if (i >= n || j >= n || j >= static_cast<std::size_t>(recon_probs.cols())) {
    throw std::out_of_range("score_pair: index out of range");
  }
  const auto r = static_cast<Eigen::Index>(i);
  const auto s = static_cast<Eigen::Index>(j);
  return undirected ? 0.5 * (recon_probs(r, s) + recon_probs(s, r)) : recon_probs(r, s);
}

LinkScorer::LinkScorer(const ModelParams& params, const nn::Matrix& rows,
                       std::span<const std::size_t> nodes, std::size_t n_nodes, bool undirected)
    : probs_(predict_links(params, rows)), row_of_(n_nodes, n_nodes), undirected_(undirected) {
  if (static_cast<std::size_t>(rows.rows()) != nodes.size()) {
    throw std::invalid_argument("LinkScorer: one input row per node is required");
  }
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    if (nodes[r] >= n_nodes) {
      throw std::out_of_range("LinkScorer: node out of range");
    }
    row_of_[nodes[r]] = r;
  }
}

double LinkScorer::probability(std::size_t i, std::size_t j) const {
  if (i >= row_of_.size() || j >= row_of_.size() || row_of_[i] == row_of_.size()) {
    throw std::out_of_range("LinkScorer: node " + std::to_string(i) + " was not scored");
  }
  return probs_(static_cast<Eigen::Index>(row_of_[i]), static_cast<Eigen::Index>(j));
}

double LinkScorer::score_pair(std::size_t i, std::size_t j) const {
  return undirected_ ? 0.5 * (probability(i, j) + probability(j, i)) : probability(i, j);
}

GradientCheckResult gradient_check(const ModelParams& params, const nn::Matrix& batch,
                                   const LossInputs& loss, const Gradients& analytic, double h) {
  ModelParams probe = params;
  auto blocks = probe.blocks();
  const auto grads = analytic.blocks();
  if (grads.size() != blocks.size()) {
    throw std::invalid_argument("gradient_check: gradient block count mismatch");
  }

  GradientCheckResult result;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (grads[b].size() != blocks[b].size()) {
      throw std::invalid_argument("gradient_check: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      const double saved = blocks[b][i];
      blocks[b][i] = saved + h;
      const double up = multitask_loss(forward(probe, batch), loss);
      blocks[b][i] = saved - h;
      const double down = multitask_loss(forward(probe, batch), loss);
      blocks[b][i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      const double a = grads[b][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double err = std::abs(a - numeric) / denom;
      if (err > result.max_rel_error) {
        result = {err, b, i};
      }
    }
  }
  return result;
}

GradientCheckResult gradient_check(const ModelParams& params, const nn::Matrix& batch,
                                   const LossInputs& loss, double h) {
  const auto fwd = forward(params, batch);
  return gradient_check(params, batch, loss, backward(params, fwd, loss), h);
}

}  // namespace mtgae::model
