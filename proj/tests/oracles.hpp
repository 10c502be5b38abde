#pragma once

// Scalar reference implementations used as oracles by the unit and
// acceptance tests. Nothing here calls into the library's math.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "mtgae/model.hpp"

namespace mtgae::oracle {

using Vec = std::vector<double>;
using nn::Matrix;

inline Vec relu_mvn(const Vec& pre) {
  Vec a(pre.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    a[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    mean += a[i];
  }
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= static_cast<double>(a.size());
  for (double& x : a) x = (x - mean) / std::sqrt(var + 1e-6);
  return a;
}

struct Output {
  Vec h1;
  Vec z;
  Vec d;
  Vec recon;
  Vec cls;
};

/// One neuron at a time: h1 = MVN(ReLU(V a + b1)), z = MVN(ReLU(W h1 + b2)),
/// d = MVN(ReLU(W^T z + b3)), recon = V^T d + b4, cls = U d + b5.
inline Output forward(const model::ModelParams& p, const Vec& a) {
  const auto H1 = static_cast<std::size_t>(p.V.rows());
  const auto M = static_cast<std::size_t>(p.V.cols());
  const auto H2 = static_cast<std::size_t>(p.W.rows());
  const auto C = static_cast<std::size_t>(p.U.rows());
  Output out;
  Vec pre1(H1);
  for (std::size_t k = 0; k < H1; ++k) {
    double s = p.b1(k);
    for (std::size_t m = 0; m < M; ++m) s += p.V(k, m) * a[m];
    pre1[k] = s;
  }
  out.h1 = relu_mvn(pre1);
  Vec pre2(H2);
  for (std::size_t k = 0; k < H2; ++k) {
    double s = p.b2(k);
    for (std::size_t m = 0; m < H1; ++m) s += p.W(k, m) * out.h1[m];
    pre2[k] = s;
  }
  out.z = relu_mvn(pre2);
  Vec pre3(H1);
  for (std::size_t k = 0; k < H1; ++k) {
    double s = p.b3(k);
    for (std::size_t m = 0; m < H2; ++m) s += p.W(m, k) * out.z[m];
    pre3[k] = s;
  }
  out.d = relu_mvn(pre3);
  out.recon.assign(M, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    double s = p.b4(j);
    for (std::size_t k = 0; k < H1; ++k) s += p.V(k, j) * out.d[k];
    out.recon[j] = s;
  }
  out.cls.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    double s = p.b5(c);
    for (std::size_t k = 0; k < H1; ++k) s += p.U(c, k) * out.d[k];
    out.cls[c] = s;
  }
  return out;
}

/// Mean of -(zeta t log p + (1 - t) log(1 - p)) over entries with mask 1.
inline double mbce(const Matrix& logits, const Matrix& targets, const Matrix& mask, double zeta) {
  double total = 0.0;
  double count = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      if (mask(r, c) == 0.0) continue;
      const double p = 1.0 / (1.0 + std::exp(-logits(r, c)));
      const double t = targets(r, c);
      total += -(zeta * t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
      count += 1.0;
    }
  }
  return count > 0.0 ? total / count : 0.0;
}

/// Mean of -log softmax(logits)[label] over labeled rows.
inline double masked_ce(const Matrix& logits, const std::vector<std::optional<std::size_t>>& labels) {
  double total = 0.0;
  double count = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    if (!labels[r]) continue;
    double denom = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) denom += std::exp(logits(r, c));
    total += -std::log(std::exp(logits(r, static_cast<Eigen::Index>(*labels[r]))) / denom);
    count += 1.0;
  }
  return count > 0.0 ? total / count : 0.0;
}

/// Multitask loss of a batch computed entirely with the scalar forward.
inline double loss(const model::ModelParams& p, const Matrix& batch, const model::LossInputs& in) {
  const auto M = static_cast<Eigen::Index>(p.V.cols());
  const auto C = static_cast<Eigen::Index>(p.U.rows());
  Matrix recon(batch.rows(), M);
  Matrix cls(batch.rows(), C);
  for (Eigen::Index r = 0; r < batch.rows(); ++r) {
    Vec a(static_cast<std::size_t>(M));
    for (Eigen::Index j = 0; j < M; ++j) a[static_cast<std::size_t>(j)] = batch(r, j);
    const auto out = forward(p, a);
    for (Eigen::Index j = 0; j < M; ++j) recon(r, j) = out.recon[static_cast<std::size_t>(j)];
    for (Eigen::Index c = 0; c < C; ++c) cls(r, c) = out.cls[static_cast<std::size_t>(c)];
  }
  double total = mbce(recon, in.targets, in.mask, in.zeta);
  if (C > 0) total += masked_ce(cls, in.labels);
  return total;
}

/// Central-difference gradient of `loss` for every parameter entry, in
/// ModelParams::blocks() order.
inline std::vector<Vec> numeric_gradient(const model::ModelParams& params, const Matrix& batch,
                                         const model::LossInputs& in, double h = 1e-5) {
  model::ModelParams p = params;
  std::vector<Vec> grads;
  for (auto block : p.blocks()) {
    Vec g(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + h;
      const double up = loss(p, batch, in);
      block[i] = saved - h;
      const double down = loss(p, batch, in);
      block[i] = saved;
      g[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

/// (concordant + 0.5 * tied) / (#pos * #neg) by enumerating every pair.
inline double brute_auc(const Vec& s, const std::vector<int>& y) {
  double num = 0.0;
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] == 1) pos += 1.0; else neg += 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      if (s[i] > s[j]) num += 1.0;
      else if (s[i] == s[j]) num += 0.5;
    }
  }
  return num / (pos * neg);
}

/// Walks ranks 1..n; an item's rank is 1 + #items strictly ahead of it, where
/// "ahead" means higher score, or equal score and earlier position.
inline double rank_walk_ap(const Vec& s, const std::vector<int>& y) {
  const std::size_t n = s.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++ahead;
    }
    rank[i] = ahead + 1;
  }
  double total = 0.0;
  double positives = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rank[i] != r || y[i] != 1) continue;
      positives += 1.0;
      total += positives / static_cast<double>(r);
    }
  }
  return total / positives;
}

}  // namespace mtgae::oracle
