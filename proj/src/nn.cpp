#include "mtgae/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mtgae::nn {

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  if (fan_in == 0 || fan_out == 0) {
    throw std::invalid_argument("glorot_uniform: dimensions must be positive");
  }
  const double limit = glorot_limit(fan_in, fan_out);
  Matrix w(fan_out, fan_in);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = rng.uniform(-limit, limit);
  }
  return w;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_grad(const Matrix& x) {
  return (x.array() > 0.0).cast<double>().matrix();
}

Matrix mvn(const Matrix& x, double eps) {
  Matrix y(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const auto centered = x.row(r).array() - mean;
    const double var = centered.square().sum() / n;
    y.row(r) = centered / std::sqrt(var + eps);
  }
  return y;
}

// With y = (x - mu) / s and s = sqrt(var + eps):
//   dx = (dy - mean(dy) - y * mean(dy * y)) / s
Matrix mvn_backward(const Matrix& x, const Matrix& dy, double eps) {
  if (x.rows() != dy.rows() || x.cols() != dy.cols()) {
    throw std::invalid_argument("mvn_backward: shape mismatch");
  }
  Matrix dx(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const Eigen::ArrayXd centered = (x.row(r).array() - mean).transpose();
    const double inv_std = 1.0 / std::sqrt(centered.square().sum() / n + eps);
    const Eigen::ArrayXd y = centered * inv_std;
    const Eigen::ArrayXd g = dy.row(r).array().transpose();
    const double g_mean = g.sum() / n;
    const double gy_mean = (g * y).sum() / n;
    dx.row(r) = ((g - g_mean - y * gy_mean) * inv_std).transpose();
  }
  return dx;
}

DropoutResult dropout(const Matrix& x, double rate, RngStream& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  }
  if (!training || rate == 0.0) {
    return {x, Matrix::Ones(x.rows(), x.cols())};
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return {x.cwiseProduct(mask), std::move(mask)};
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

RowVector softmax(const RowVector& logits) {
  const RowVector shifted = logits.array() - logits.maxCoeff();
  const RowVector e = shifted.array().exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    out.row(r) = softmax(logits.row(r));
  }
  return out;
}

RowVector log_softmax(const RowVector& logits) {
  const double max = logits.maxCoeff();
  const double lse = max + std::log((logits.array() - max).exp().sum());
  return logits.array() - lse;
}

// -log(sigmoid(l)) = softplus(-l);  -log(1 - sigmoid(l)) = softplus(l)
double weighted_bce_from_logits(double logit, double target, double zeta) {
  return target * zeta * softplus(-logit) + (1.0 - target) * softplus(logit);
}

double weighted_bce_grad(double logit, double target, double zeta) {
  const double s = sigmoid(logit);
  return target * zeta * (s - 1.0) + (1.0 - target) * s;
}

AdamState::AdamState(AdamConfig cfg, std::span<const std::size_t> block_sizes)
    : config(cfg) {
  m.reserve(block_sizes.size());
  v.reserve(block_sizes.size());
  for (const auto size : block_sizes) {
    m.emplace_back(size, 0.0);
    v.emplace_back(size, 0.0);
  }
}

void adam_update(std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_update: block count mismatch");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() || params[b].size() != state.m[b].size()) {
      throw std::invalid_argument("adam_update: size mismatch in block " +
                                  std::to_string(b));
    }
  }

  const auto& c = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);

  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    auto& m = state.m[b];
    auto& v = state.v[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

}  // namespace mtgae::nn
