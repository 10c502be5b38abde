#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mtgae/errors.hpp"
#include "mtgae/model.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace mtgae::model {
namespace {

using nn::Matrix;
using Vec = std::vector<double>;

const ModelDims kTiny{6, 4, 3, 2};

Matrix binary_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = coin(gen) ? 1.0 : 0.0;
  return m;
}

LossInputs random_loss(std::size_t batch, const ModelDims& dims, std::mt19937_64& gen) {
  LossInputs loss;
  loss.targets = binary_matrix(batch, dims.input_dim, gen, 0.4);
  loss.mask = binary_matrix(batch, dims.input_dim, gen, 0.8);
  loss.zeta = std::uniform_real_distribution<double>(0.2, 1.0)(gen);
  loss.labels.resize(batch);
  for (std::size_t r = 0; r < batch; ++r) {
    if (dims.num_classes > 0 && gen() % 3 != 0) loss.labels[r] = gen() % dims.num_classes;
  }
  return loss;
}

TEST(Forward, ZeroModelCollapsesToBias) {
  const auto p = ModelParams::zeros({5, 4, 3, 0});
  std::mt19937_64 gen(1);
  const auto out = forward(p, test::random_matrix(2, 5, gen));
  EXPECT_EQ(out.recon_logits.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.class_logits.size(), 0);
}

TEST(Forward, Shapes) {
  nn::RngStream rng(0);
  const auto p = ModelParams::glorot({10, 256, 128, 0}, rng);
  std::mt19937_64 gen(2);
  const auto out = forward(p, test::random_matrix(3, 10, gen));
  EXPECT_EQ(out.recon_logits.rows(), 3);
  EXPECT_EQ(out.recon_logits.cols(), 10);
  EXPECT_EQ(out.cache.z.rows(), 3);
  EXPECT_EQ(out.cache.z.cols(), 128);
}

TEST(Forward, MatchesNaivePerNeuronEvaluation) {
  std::mt19937_64 gen(3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = test::random_params(kTiny, gen);
    const Matrix batch = binary_matrix(3, 6, gen);
    const auto out = forward(p, batch);
    for (Eigen::Index r = 0; r < 3; ++r) {
      Vec a(6);
      for (int j = 0; j < 6; ++j) a[j] = batch(r, j);
      const auto ref = oracle::forward(p, a);
      for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(ref.recon[j] - out.recon_logits(r, j)));
      for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(ref.cls[c] - out.class_logits(r, c)));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Forward, InferenceIgnoresDropoutRate) {
  std::mt19937_64 gen(4);
  const auto p = test::random_params(kTiny, gen);
  const Matrix batch = binary_matrix(3, 6, gen);
  nn::RngStream rng(1);
  const auto a = forward(p, batch, false, 0.5, rng);
  const auto b = forward(p, batch);
  EXPECT_EQ(a.recon_logits, b.recon_logits);
  EXPECT_EQ(rng.counter(), 0u);
}

TEST(Mbce, SingleEntry) {
  const Matrix l = Matrix::Zero(1, 1);
  const Matrix one = Matrix::Ones(1, 1);
  EXPECT_NEAR(mbce_loss(l, one, one, 1.0), 0.6931471805599453, 1e-15);
}

TEST(Mbce, EmptyMaskIsExactlyZero) {
  std::mt19937_64 gen(5);
  const Matrix l = test::random_matrix(4, 7, gen, -5, 5);
  const Matrix t = binary_matrix(4, 7, gen);
  const Matrix m = Matrix::Zero(4, 7);
  EXPECT_EQ(mbce_loss(l, t, m, 0.7), 0.0);
  EXPECT_EQ(mbce_grad(l, t, m, 0.7).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mbce, MatchesDoubleLoop) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix l = test::random_matrix(4, 7, gen, -6, 6);
    const Matrix t = binary_matrix(4, 7, gen);
    const Matrix m = binary_matrix(4, 7, gen, 0.7);
    const double zeta = std::uniform_real_distribution<double>(0, 1)(gen);
    ASSERT_NEAR(mbce_loss(l, t, m, zeta), oracle::mbce(l, t, m, zeta), 1e-9);
  }
}

TEST(Mbce, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(7);
  const Matrix l = test::random_matrix(3, 5, gen, -3, 3);
  const Matrix t = binary_matrix(3, 5, gen);
  const Matrix m = binary_matrix(3, 5, gen, 0.7);
  const Matrix g = mbce_grad(l, t, m, 0.6);
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    const double fd = test::central_difference(
        [&](double v) {
          Matrix lp = l;
          lp.data()[i] = v;
          return mbce_loss(lp, t, m, 0.6);
        },
        l.data()[i]);
    EXPECT_NEAR(g.data()[i], fd, 1e-8);
  }
}

TEST(Mbce, LinearInZetaOnPositives) {
  std::mt19937_64 gen(8);
  const Matrix l = test::random_matrix(4, 7, gen, -3, 3);
  const Matrix t = Matrix::Ones(4, 7);
  const Matrix m = Matrix::Ones(4, 7);
  EXPECT_NEAR(mbce_loss(l, t, m, 0.5), 0.5 * mbce_loss(l, t, m, 1.0), 1e-14);
}

TEST(MaskedCe, UniformLogits) {
  const Matrix l = Matrix::Zero(2, 4);
  const std::vector<std::optional<std::size_t>> labels = {std::nullopt, 3};
  EXPECT_NEAR(masked_ce_loss(l, labels), 1.3862943611198906, 1e-15);
}

TEST(MaskedCe, NoLabelsIsZero) {
  std::mt19937_64 gen(9);
  const Matrix l = test::random_matrix(3, 4, gen);
  const std::vector<std::optional<std::size_t>> none(3);
  EXPECT_EQ(masked_ce_loss(l, none), 0.0);
  EXPECT_EQ(masked_ce_grad(l, none).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MaskedCe, MatchesNaiveReference) {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix l = test::random_matrix(5, 4, gen, -8, 8);
    std::vector<std::optional<std::size_t>> labels(5);
    for (auto& x : labels) {
      if (gen() % 2) x = gen() % 4;
    }
    ASSERT_NEAR(masked_ce_loss(l, labels), oracle::masked_ce(l, labels), 1e-9);
  }
}

TEST(MaskedCe, LabelOutOfRangeThrows) {
  const Matrix l = Matrix::Zero(1, 2);
  const std::vector<std::optional<std::size_t>> labels = {5};
  EXPECT_THROW(masked_ce_grad(l, labels), std::invalid_argument);
}

TEST(MultitaskLoss, IsSumOfComponents) {
  std::mt19937_64 gen(11);
  const auto p = test::random_params(kTiny, gen);
  const Matrix batch = binary_matrix(3, 6, gen);
  const auto fwd = forward(p, batch);
  auto loss = random_loss(3, kTiny, gen);
  const double mbce = mbce_loss(fwd.recon_logits, loss.targets, loss.mask, loss.zeta);
  const double ce = masked_ce_loss(fwd.class_logits, loss.labels);
  EXPECT_NEAR(multitask_loss(fwd, loss), mbce + ce, 1e-12);

  auto unlabeled = loss;
  unlabeled.labels.assign(3, std::nullopt);
  EXPECT_EQ(multitask_loss(fwd, unlabeled), mbce);

  auto unmasked = loss;
  unmasked.mask.setZero();
  EXPECT_EQ(multitask_loss(fwd, unmasked), ce);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 gen(12);
  const auto p = test::random_params(kTiny, gen);
  const auto fwd = forward(p, binary_matrix(3, 6, gen));
  auto loss = random_loss(3, kTiny, gen);
  loss.mask.setZero();
  loss.labels.assign(3, std::nullopt);
  const auto g = backward(p, fwd, loss);
  for (auto block : g.blocks()) {
    for (double x : block) ASSERT_EQ(x, 0.0);
  }
}

TEST(Backward, RejectsStaleCache) {
  std::mt19937_64 gen(13);
  auto p = test::random_params(kTiny, gen);
  const auto fwd = forward(p, binary_matrix(3, 6, gen));
  const auto loss = random_loss(3, kTiny, gen);
  p.blocks()[0][0] += 1.0;
  EXPECT_THROW(backward(p, fwd, loss), std::logic_error);
  const auto other = p;
  EXPECT_THROW(backward(other, forward(p, binary_matrix(3, 6, gen)), loss), std::logic_error);
}

TEST(GradientCheck, RandomTinyModels) {
  std::mt19937_64 gen(14);
  int checked = 0;
  while (checked < 20) {
    const auto p = test::random_params(kTiny, gen);
    const Matrix batch = test::random_matrix(3, 6, gen, 0.0, 1.0);
    if (test::min_abs_preactivation(p, batch) < 1e-3) continue;
    const auto loss = random_loss(3, kTiny, gen);
    const auto r = gradient_check(p, batch, loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << "block " << r.worst_block << " index " << r.worst_index;
    ++checked;
  }
}

TEST(GradientCheck, SmoothRegion) {
  // Positive inputs, weights and biases keep every ReLU input positive.
  std::mt19937_64 gen(15);
  auto p = test::random_params(kTiny, gen);
  p.b1.array() += 10.0;
  p.b2.array() += 10.0;
  p.b3.array() += 10.0;
  const Matrix batch = test::random_matrix(3, 6, gen, 0.1, 1.0);
  const auto fwd = forward(p, batch);
  ASSERT_GT(fwd.cache.pre1.minCoeff(), 0.0);
  ASSERT_GT(fwd.cache.pre2.minCoeff(), 0.0);
  ASSERT_GT(fwd.cache.pre3.minCoeff(), 0.0);
  const auto r = gradient_check(p, batch, random_loss(3, kTiny, gen));
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(GradientCheck, DetectsCorruptedGradient) {
  std::mt19937_64 gen(16);
  ModelParams p;
  Matrix batch;
  do {
    p = test::random_params(kTiny, gen);
    batch = test::random_matrix(3, 6, gen, 0.0, 1.0);
  } while (test::min_abs_preactivation(p, batch) < 1e-3);
  auto loss = random_loss(3, kTiny, gen);
  loss.mask.setOnes();
  auto g = backward(p, forward(p, batch), loss);
  // Double the largest V gradient entry.
  auto v = g.blocks()[0];
  auto it = std::max_element(v.begin(), v.end(),
                             [](double a, double b) { return std::abs(a) < std::abs(b); });
  *it *= 2.0;
  const auto r = gradient_check(p, batch, loss, g);
  EXPECT_GT(r.max_rel_error, 0.1);
  EXPECT_EQ(r.worst_block, 0u);
}

TEST(Tying, WeightCountAndParameterCount) {
  const auto p = ModelParams::zeros({100, 256, 128, 7});
  EXPECT_EQ(p.weight_count(), 256u * 100 + 128u * 256 + 7u * 256);
  EXPECT_EQ(p.parameter_count(), p.weight_count() + 256 + 128 + 256 + 100 + 7);
  const auto q = ModelParams::zeros({100, 256, 128, 0});
  EXPECT_EQ(q.weight_count(), 256u * 100 + 128u * 256);
}

TEST(Tying, PerturbingVChangesEncoderAndDecoder) {
  std::mt19937_64 gen(17);
  auto p = test::random_params(kTiny, gen);
  const Matrix batch = Matrix::Ones(1, 6);
  const auto before = forward(p, batch);
  p.V(0, 2) += 0.5;
  const auto after = forward(p, batch);
  EXPECT_NE(before.cache.pre1(0, 0), after.cache.pre1(0, 0));
  // Decoder output column 2 sees V(0, 2) directly through V^T.
  const double direct = (after.cache.d * p.V).row(0)(2) + p.b4(2);
  EXPECT_NEAR(after.recon_logits(0, 2), direct, 1e-12);
  EXPECT_NE(before.recon_logits(0, 2), after.recon_logits(0, 2));
}

TEST(Tying, VAndWGradientsAccumulateBothUses) {
  // Finite differences already cover the sum; this checks the decoder part alone
  // is not the whole gradient.
  std::mt19937_64 gen(18);
  ModelParams p;
  Matrix batch;
  do {
    p = test::random_params(kTiny, gen);
    batch = test::random_matrix(3, 6, gen, 0.0, 1.0);
  } while (test::min_abs_preactivation(p, batch) < 1e-3);
  auto loss = random_loss(3, kTiny, gen);
  loss.mask.setOnes();
  const auto fwd = forward(p, batch);
  const auto g = backward(p, fwd, loss);
  const Matrix dlogits = mbce_grad(fwd.recon_logits, loss.targets, loss.mask, loss.zeta);
  const Matrix decoder_only = fwd.cache.d.transpose() * dlogits;
  EXPECT_GT((g.V - decoder_only).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(gradient_check(p, batch, loss).max_rel_error, 1e-4);
}

TEST(MaskInvariance, UnobservedTargetsDoNotMatter) {
  std::mt19937_64 gen(19);
  const auto p = test::random_params(kTiny, gen);
  const Matrix batch = binary_matrix(3, 6, gen);
  const auto fwd = forward(p, batch);
  auto loss = random_loss(3, kTiny, gen);
  auto flipped = loss;
  for (Eigen::Index i = 0; i < loss.mask.size(); ++i) {
    if (loss.mask.data()[i] == 0.0) flipped.targets.data()[i] = 1.0 - loss.targets.data()[i];
  }
  EXPECT_EQ(multitask_loss(fwd, loss), multitask_loss(fwd, flipped));
  const auto ga = backward(p, fwd, loss);
  const auto gb = backward(p, fwd, flipped);
  EXPECT_EQ(ga.V, gb.V);
}

TEST(Predict, ZeroLogitsGiveOneHalf) {
  const auto p = ModelParams::zeros({4, 3, 2, 3});
  const auto probs = predict_links(p, Matrix::Ones(2, 4));
  EXPECT_EQ(probs, Matrix::Constant(2, 4, 0.5));
  const auto cls = predict_nodes(p, Matrix::Ones(2, 4));
  for (Eigen::Index i = 0; i < cls.size(); ++i) EXPECT_NEAR(cls.data()[i], 1.0 / 3.0, 1e-15);
  EXPECT_THROW(predict_nodes(ModelParams::zeros({4, 3, 2, 0}), Matrix::Ones(1, 4)), std::logic_error);
}

TEST(Predict, ScorePairAveragesDirections) {
  std::mt19937_64 gen(20);
  const auto p = test::random_params({5, 4, 3, 0}, gen);
  const Matrix rows = binary_matrix(5, 5, gen);
  const auto probs = predict_links(p, rows);
  const auto logits = forward(p, rows).recon_logits;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double si = 1.0 / (1.0 + std::exp(-logits(i, j)));
      const double sj = 1.0 / (1.0 + std::exp(-logits(j, i)));
      EXPECT_NEAR(score_pair(probs, i, j, true), 0.5 * (si + sj), 1e-12);
      EXPECT_NEAR(score_pair(probs, i, j, false), si, 1e-12);
    }
  }
  Matrix sym(2, 2);
  sym << 0.2, 0.7, 0.7, 0.9;
  EXPECT_EQ(score_pair(sym, 0, 1, true), 0.7);
}

TEST(Predict, LinkScorerMatchesFullMatrix) {
  std::mt19937_64 gen(21);
  const auto p = test::random_params({5, 4, 3, 0}, gen);
  const Matrix rows = binary_matrix(5, 5, gen);
  const auto probs = predict_links(p, rows);
  const std::size_t nodes[] = {0, 1, 2, 3, 4};
  const LinkScorer scorer(p, rows, nodes, 5, true);
  EXPECT_NEAR(scorer.score_pair(1, 3), score_pair(probs, 1, 3, true), 1e-15);
  EXPECT_NEAR(scorer.probability(4, 0), probs(4, 0), 1e-15);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  std::mt19937_64 gen(22);
  Checkpoint ckpt{test::random_params(kTiny, gen), 0.987654321, {{"seed", 3}}};
  std::stringstream buf;
  write_checkpoint(buf, ckpt);
  const auto back = read_checkpoint(buf);
  EXPECT_EQ(back.params.dims(), kTiny);
  EXPECT_EQ(back.params.V, ckpt.params.V);
  EXPECT_EQ(back.params.b5, ckpt.params.b5);
  EXPECT_EQ(back.params.U, ckpt.params.U);
  EXPECT_EQ(back.zeta, ckpt.zeta);
  EXPECT_EQ(back.config["seed"], 3);
}

TEST(Checkpoint, WithoutHeadRoundTrips) {
  std::mt19937_64 gen(23);
  Checkpoint ckpt{test::random_params({6, 4, 3, 0}, gen), 0.5, {}};
  std::stringstream buf;
  write_checkpoint(buf, ckpt);
  const auto back = read_checkpoint(buf);
  EXPECT_FALSE(back.params.has_classifier());
  EXPECT_EQ(back.params.b4, ckpt.params.b4);
}

TEST(Checkpoint, TruncatedOrPaddedFilesAreRejected) {
  std::mt19937_64 gen(24);
  Checkpoint ckpt{test::random_params(kTiny, gen), 0.9, {}};
  std::stringstream buf;
  write_checkpoint(buf, ckpt);
  const std::string bytes = buf.str();
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), ArtifactError);
  std::istringstream padded(bytes + "x");
  EXPECT_THROW(read_checkpoint(padded), ArtifactError);
  std::istringstream garbage("not a checkpoint\n");
  EXPECT_THROW(read_checkpoint(garbage), ArtifactError);
}

}  // namespace
}  // namespace mtgae::model
