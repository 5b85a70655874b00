// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sparsearch/error.hpp"
#include "sparsearch/linear.hpp"
#include "sparsearch/loss.hpp"
#include "sparsearch/mlp.hpp"
#include "sparsearch/optimizer.hpp"
#include "sparsearch/schedule.hpp"
#include "support/oracles.hpp"

namespace sparsearch {
namespace {

LinearLayer<float> two_by_two(Mask mask) {
  LinearLayer<float> layer(2, 2);
  layer.weights = Tensor{{1, 2}, {3, 4}};
  layer.mask = std::move(mask);
  return layer;
}

TEST(LinearForward, AllOnesMaskIsDense) {
  const auto out = linear_forward(two_by_two(Mask(2, 2, 1)), Tensor{{1, 1}});
  EXPECT_EQ(out, (Tensor{{3, 7}}));
}

TEST(LinearForward, MaskedEntriesContributeNothing) {
  const auto out = linear_forward(two_by_two(Mask{{1, 0}, {0, 1}}), Tensor{{1, 1}});
  EXPECT_EQ(out, (Tensor{{1, 4}}));
}

TEST(LinearForward, ZeroMaskGivesZeroOutput) {
  LinearLayer<float> layer(3, 2);
  layer.weights = Tensor{{0.3f, -2, 5}, {1, 1, 1}};
  layer.mask = Mask(2, 3, 0);
  EXPECT_EQ(linear_forward(layer, Tensor{{1, 2, 3}, {-4, 5, 6}}), Tensor(2, 2));
}

TEST(LinearForward, StoredValuesUnderMaskAreIrrelevant) {
  auto a = two_by_two(Mask{{1, 0}, {0, 1}});
  auto b = a;
  b.weights(0, 1) = 0.0f;
  b.weights(1, 0) = -100.0f;
  const Tensor x{{0.5f, -1.5f}, {2, 3}};
  EXPECT_EQ(linear_forward(a, x), linear_forward(b, x));
}

TEST(LinearForward, ShapeMismatchThrows) {
  EXPECT_THROW(linear_forward(two_by_two(Mask(2, 2, 1)), Tensor{{1, 1, 1}}), DimensionError);
}

TEST(LinearBackward, GradientIsDenseUnderMask) {
  LinearLayer<float> layer(1, 1);
  layer.weights = Tensor{{5}};
  layer.mask = Mask{{0}};
  const auto g = linear_backward(layer, Tensor{{2}}, Tensor{{1}});
  EXPECT_EQ(g.weights, (Tensor{{2}}));
  EXPECT_EQ(g.input, (Tensor{{0}}));
}

TEST(LinearBackward, AllOnesMaskMatchesDenseFormula) {
  auto layer = two_by_two(Mask(2, 2, 1));
  const Tensor x{{1, 2}, {3, -1}};
  const Tensor go{{0.5f, 1}, {-1, 2}};
  const auto g = linear_backward(layer, x, go);
  // dW = go^T x, dx = go W, db = column sums of go
  EXPECT_EQ(g.weights, (Tensor{{0.5f - 3, 1 + 1}, {1 + 6, 2 - 2}}));
  EXPECT_EQ(g.input, (Tensor{{0.5f + 3, 1 + 4}, {-1 + 6, -2 + 8}}));
  EXPECT_EQ(g.bias, (Tensor{{-0.5f, 3}}));
}

TEST(LinearBackward, MatchesFiniteDifferencesOnRandomLayer) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mlp<double> model(4, std::vector<std::size_t>{}, 3, 1);
  auto& layer = model.layers()[0];
  for (std::size_t k = 0; k < layer.weights.size(); ++k) {
    layer.weights[k] = u(gen);
    layer.mask[k] = gen() % 2;
  }
  Tensor64 x(2, 4), y(2, 3);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = u(gen);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = u(gen);
  const auto loss = compute_loss(LossKind::mse, model.forward(x), y);
  const auto grads = model.backward(loss.grad);
  const auto check = oracle::check_gradients(model, x, y, false, grads.weights, 1e-3);
  EXPECT_EQ(check.entries, 12u);
  EXPECT_EQ(check.failures, 0u) << "worst " << check.worst_rel;
}

TEST(MlpGradients, MatchFiniteDifferencesForBothLosses) {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 10; ++t) {
    const bool ce = t % 2;
    Mlp<double> model(5, std::vector<std::size_t>{7, 6}, 4, 1);
    Rng rng(gen());
    model.initialize(rng);
    std::normal_distribution<double> n;
    // Nonzero biases keep fully masked units off the ReLU kink at 0.
    for (auto& layer : model.layers()) {
      for (std::size_t k = 0; k < layer.mask.size(); ++k) layer.mask[k] = gen() % 3 != 0;
      for (std::size_t k = 0; k < layer.bias.size(); ++k) layer.bias[k] = 0.1 * n(gen);
    }
    Tensor64 x(3, 5), y(3, ce ? 1 : 4);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = n(gen);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = ce ? static_cast<double>(gen() % 4) : n(gen);
    const auto loss = compute_loss(ce ? LossKind::cross_entropy : LossKind::mse, model.forward(x), y);
    const auto check = oracle::check_gradients(model, x, y, ce, model.backward(loss.grad).weights, 1e-3);
    EXPECT_EQ(check.failures, 0u) << "instance " << t << " worst " << check.worst_rel;
  }
}

TEST(Mlp, SmallInputLayerIsExempt) {
  Mlp<float> spiral(2, std::vector<std::size_t>{64, 64}, 3);
  ASSERT_EQ(spiral.layers().size(), 3u);
  EXPECT_FALSE(spiral.layers()[0].sparsify);
  EXPECT_TRUE(spiral.layers()[1].sparsify);
  EXPECT_TRUE(spiral.layers()[2].sparsify);
}

TEST(Mlp, InitializationIsSeededAndBounded) {
  Mlp<float> a(20, std::vector<std::size_t>{10}, 2), b(20, std::vector<std::size_t>{10}, 2);
  Rng ra(9), rb(9);
  a.initialize(ra);
  b.initialize(rb);
  EXPECT_EQ(a.layers()[0].weights, b.layers()[0].weights);
  const float bound = std::sqrt(6.0f / 20.0f);
  for (std::size_t k = 0; k < a.layers()[0].weights.size(); ++k) {
    EXPECT_LE(std::fabs(a.layers()[0].weights[k]), bound);
  }
  EXPECT_EQ(a.layers()[0].bias, Tensor(1, 10));
}

TEST(Loss, MsePerfectFitIsZero) {
  const Tensor p{{1, 2}, {3, 4}};
  EXPECT_EQ(compute_loss(LossKind::mse, p, p).value, 0.0);
}

TEST(Loss, MseSingleEntry) {
  const auto r = compute_loss(LossKind::mse, Tensor{{1}}, Tensor{{0}});
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_EQ(r.grad, (Tensor{{2}}));
}

TEST(Loss, CrossEntropyOfUniformLogits) {
  const auto r = compute_loss(LossKind::cross_entropy, Tensor{{0.3f, 0.3f, 0.3f, 0.3f}}, Tensor{{2}});
  EXPECT_NEAR(r.value, std::log(4.0), 1e-7);
  EXPECT_NEAR(r.value, 1.3863, 1e-4);
}

TEST(Loss, EmptyBatchThrows) {
  EXPECT_THROW(compute_loss(LossKind::mse, Tensor(0, 2), Tensor(0, 2)), DomainError);
  EXPECT_THROW(compute_loss(LossKind::cross_entropy, Tensor(0, 2), Tensor(0, 1)), DomainError);
}

TEST(Loss, AccuracyCountsArgmaxHits) {
  const Tensor p{{0.1f, 0.9f}, {2, 1}, {0, 0.5f}};
  EXPECT_DOUBLE_EQ(accuracy(p, Tensor{{1}, {1}, {1}}), 2.0 / 3.0);
}

LrSchedule constant_lr(double lr) {
  LrSchedule s;
  s.base_lr = lr;
  s.kind = DecayKind::constant;
  return s;
}

TEST(Optimizer, VanillaStep) {
  SgdMomentum<float> opt(constant_lr(0.1), 0.0);
  const auto slot = opt.add_slot({1, 1});
  Tensor w{{1}};
  opt.step(slot, w, Tensor{{1}}, 0);
  EXPECT_FLOAT_EQ(w[0], 0.9f);
}

TEST(Optimizer, ZeroLearningRateFreezes) {
  SgdMomentum<float> opt(constant_lr(0.0), 0.9);
  const auto slot = opt.add_slot({1, 2});
  Tensor w{{1, -3}};
  opt.step(slot, w, Tensor{{5, 7}}, 0);
  EXPECT_EQ(w, (Tensor{{1, -3}}));
}

TEST(Optimizer, MomentumTwoStepRecurrence) {
  SgdMomentum<double> opt(constant_lr(0.1), 0.9);
  const auto slot = opt.add_slot({1, 1});
  Tensor64 w{{1}};
  opt.step(slot, w, Tensor64{{1}}, 0);
  EXPECT_NEAR(w[0], 0.9, 1e-12);
  opt.step(slot, w, Tensor64{{1}}, 1);
  EXPECT_NEAR(w[0], 0.71, 1e-12);
}

TEST(Optimizer, RejectsMomentumOutOfRange) {
  EXPECT_THROW(SgdMomentum<float>(constant_lr(0.1), 1.0), DomainError);
}

TEST(Schedule, LinearWarmup) {
  LrSchedule s;
  s.base_lr = 1.0;
  s.warmup_steps = 10;
  EXPECT_EQ(lr_at(s, 0), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(s, 1), 0.1);
  EXPECT_DOUBLE_EQ(lr_at(s, 10), 1.0);
}

TEST(Schedule, StretchMovesDropMilestones) {
  LrSchedule s;
  s.base_lr = 1.0;
  s.warmup_steps = 0;
  s.decay_steps = 100;
  s.milestones = {0.5};
  s.drop_factor = 0.1;
  EXPECT_DOUBLE_EQ(lr_at(s, 49), 1.0);
  EXPECT_DOUBLE_EQ(lr_at(s, 50), 0.1);
  s.stretch = 2.0;
  EXPECT_DOUBLE_EQ(lr_at(s, 99), 1.0);
  EXPECT_DOUBLE_EQ(lr_at(s, 100), 0.1);
  EXPECT_EQ(s.stretched_total(), 200u);
}

TEST(Schedule, StretchIdentityForStepDrop) {
  LrSchedule base;
  base.base_lr = 0.3;
  base.warmup_steps = 7;
  base.decay_steps = 90;
  for (double t : {1.5, 2.0, 4.0}) {
    LrSchedule st = base;
    st.stretch = t;
    for (std::size_t k = 0; k <= 90; ++k) {
      const auto stretched_step = static_cast<std::size_t>(std::llround(static_cast<double>(k) * t));
      if (std::fabs(static_cast<double>(k) * t - static_cast<double>(stretched_step)) > 1e-12) continue;
      EXPECT_DOUBLE_EQ(lr_at(st, 7 + stretched_step), lr_at(base, 7 + k)) << "t=" << t << " k=" << k;
    }
  }
}

TEST(Schedule, DecayKindsAreNonNegativeAndDecreasing) {
  for (auto kind : {DecayKind::inverse, DecayKind::cosine, DecayKind::step_drop}) {
    LrSchedule s;
    s.kind = kind;
    s.warmup_steps = 5;
    s.decay_steps = 50;
    double prev = lr_at(s, 5);
    for (std::size_t i = 6; i < 80; ++i) {
      const double lr = lr_at(s, i);
      EXPECT_GE(lr, 0.0);
      EXPECT_LE(lr, prev + 1e-15);
      prev = lr;
    }
  }
}

TEST(Schedule, StretchBelowOneIsRejected) {
  LrSchedule s;
  s.stretch = 0.5;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(Tensor, CeilFractionAbsorbsRoundingNoise) {
  EXPECT_EQ(ceil_fraction(0.7, 10), 7u);
  EXPECT_EQ(ceil_fraction(0.1, 30), 3u);
  EXPECT_EQ(ceil_fraction(0.25, 10), 3u);
  EXPECT_EQ(ceil_fraction(1e-6, 10), 1u);
}

}  // namespace
}  // namespace sparsearch
