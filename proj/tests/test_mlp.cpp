#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dyno/mlp.hpp"
#include "oracles.hpp"

namespace dyno {
namespace {

TEST(Forward, Shapes) {
  Rng rng(1);
  const auto w = MLPWeights::random(30, 5, rng);
  EXPECT_EQ(w.concat_size(), 20u);
  EXPECT_EQ(w.parameter_count(), 30u * 4 + 4 + 20 * 30 + 30);
  const std::vector<double> in(150, 0.3);
  EXPECT_EQ(forward(w, in).size(), 30u);
  EXPECT_THROW(forward(w, std::vector<double>(149, 0.0)), std::invalid_argument);
}

TEST(Forward, ZeroWeightsGiveZero) {
  const MLPWeights w(30, 5);
  std::vector<double> in(150);
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = std::sin(static_cast<double>(i));
  for (double v : forward(w, in)) EXPECT_EQ(v, 0.0);
}

// W1 = 0 and b1 = c: every hidden unit outputs c, so the output is the row
// sums of W2 times c, independent of the input.
TEST(Forward, ConstantHiddenLayer) {
  const std::size_t d = 3, n_t = 2;
  MLPWeights w(d, n_t);
  const double c = 0.75;
  for (double& b : w.b1) b = c;
  for (std::size_t h = 0; h < w.concat_size(); ++h) {
    for (std::size_t o = 0; o < d; ++o) w.w2[h * d + o] = 1.0;
  }
  const auto a = forward(w, std::vector<double>{1, 2, 3, 4, 5, 6});
  const auto b = forward(w, std::vector<double>{-9, 0, 9, 0.5, 0.25, -1});
  for (std::size_t o = 0; o < d; ++o) {
    EXPECT_DOUBLE_EQ(a[o], c * static_cast<double>(w.concat_size()));
    EXPECT_EQ(a[o], b[o]);
  }
}

TEST(Forward, NonFiniteWeightsRejected) {
  MLPWeights w(3, 2);
  w.w2[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(forward(w, std::vector<double>(6, 0.0)), std::logic_error);
}

TEST(Backprop, MatchesCentralDifferences) {
  std::mt19937_64 rng(99);
  for (int draw = 0; draw < 20; ++draw) {
    auto [w, s] = oracle::random_case(30, 5, rng);
    MLPWeights grad(30, 5);
    sample_loss(w, s, &grad);
    const double err = oracle::max_relative_error(grad.flatten(), oracle::numeric_gradient(w, s, 1e-5));
    EXPECT_LT(err, 1e-4) << "draw " << draw;
  }
}

TEST(Train, MemorizesSingleSample) {
  std::mt19937_64 gen(3);
  auto [w0, s] = oracle::random_case(30, 5, gen);
  Rng rng(4);
  auto w = MLPWeights::random(30, 5, rng);
  AdamState adam;
  const std::vector<TrainingSample> samples(1, s);
  const auto r = train(w, adam, samples, 200, 4, rng);
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(r.loss_history.size(), 200u);
  EXPECT_LT(mean_loss(w, samples), 1e-4);
}

TEST(Train, BatchCount) {
  std::mt19937_64 gen(5);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(oracle::random_case(4, 2, gen).second);
  Rng rng(1);
  auto w = MLPWeights::random(4, 2, rng);
  AdamState adam;
  EXPECT_EQ(train(w, adam, samples, 1, 4, rng).batches, 5u);
  EXPECT_EQ(train(w, adam, samples, 3, 4, rng).batches, 15u);
  EXPECT_EQ(adam.steps, 20u);
  EXPECT_EQ(train(w, adam, std::span(samples).first(18), 1, 4, rng).batches, 5u);
}

TEST(Train, ExplodingLossRollsBack) {
  std::mt19937_64 gen(5);
  auto [w, s] = oracle::random_case(4, 2, gen);
  s.target[0] = 1e200;
  const auto before = w;
  AdamState adam;
  Rng rng(1);
  const std::vector<TrainingSample> samples(3, s);
  const auto r = train(w, adam, samples, 5, 2, rng);
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(w.flatten(), before.flatten());
  EXPECT_EQ(adam.steps, 0u);
}

TEST(Weights, JsonRoundTrip) {
  Rng rng(8);
  const auto w = MLPWeights::random(6, 3, rng);
  EXPECT_EQ(MLPWeights::from_json(w.to_json()).flatten(), w.flatten());
}

TEST(Weights, InitRange) {
  Rng rng(8);
  const auto w = MLPWeights::random(30, 5, rng);
  for (double v : w.w1) EXPECT_LE(std::abs(v), 1.0 / std::sqrt(30.0));
  for (double v : w.w2) EXPECT_LE(std::abs(v), 1.0 / std::sqrt(20.0));
}

}  // namespace
}  // namespace dyno
