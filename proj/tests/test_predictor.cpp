#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dyno/predictor.hpp"
#include "support.hpp"

namespace dyno {
namespace {

using testing::FunctionEvaluator;
using testing::sphere_fitness;

Population random_population(std::size_t d, std::uint64_t seed) {
  FunctionEvaluator eval(sphere_fitness);
  Rng rng(seed);
  return initialize_population(DEParams{}, d, eval, rng);
}

std::vector<double> constant(std::size_t d, double v) { return std::vector<double>(d, v); }

SampleBuffer filled_buffer(std::size_t k, std::size_t periods, std::size_t d = 2,
                           std::optional<std::size_t> window = std::nullopt) {
  SampleBuffer buf(k, 5, window);
  for (std::size_t t = 0; t < periods; ++t) {
    std::vector<std::vector<double>> ps;
    for (std::size_t i = 0; i < k; ++i) ps.push_back(constant(d, 0.1 * static_cast<double>(t) + 0.01 * static_cast<double>(i)));
    buf.push(t, ps);
  }
  return buf;
}

TEST(SampleBuffer, StoresTopKUnderFeasibilityRules) {
  const auto pop = random_population(4, 1);
  const auto order = rank_members(pop);
  for (std::size_t k : {1u, 3u}) {
    SampleBuffer buf(k, 5, 5);
    buf.record_period(pop, 0);
    ASSERT_EQ(buf.entries().back().positions.size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(buf.entries().back().positions[i], pop.members[order[i]].position);
    }
  }
}

TEST(SampleBuffer, DuplicatePeriodRejected) {
  const auto pop = random_population(4, 1);
  SampleBuffer buf(1, 5, 5);
  buf.record_period(pop, 3);
  EXPECT_THROW(buf.record_period(pop, 3), std::logic_error);
  EXPECT_THROW(buf.record_period(pop, 2), std::logic_error);
}

TEST(SampleBuffer, UnboundedWindowNeverEvicts) {
  const auto pop = random_population(4, 1);
  SampleBuffer buf(1, 5, std::nullopt);
  for (std::size_t t = 0; t < 60; ++t) {
    buf.record_period(pop, t);
    EXPECT_EQ(buf.size(), t + 1);
  }
}

TEST(SampleBuffer, BoundedWindowEvicts) {
  const auto buf = filled_buffer(1, 30, 2, 5);
  EXPECT_EQ(buf.size(), 10u);
  EXPECT_EQ(buf.entries().front().period, 20u);
  EXPECT_EQ(buf.windows().size(), 5u);
}

TEST(SampleBuffer, ConvergedPopulationPadsWithDuplicates) {
  FunctionEvaluator eval(sphere_fitness);
  Population pop;
  for (int i = 0; i < 20; ++i) pop.members.push_back(make_individual(constant(3, 1.0), eval));
  SampleBuffer buf(3, 5, 5);
  buf.record_period(pop, 0);
  EXPECT_EQ(buf.entries().back().positions.size(), 3u);
}

TEST(Assembly, TooFewPeriodsGiveNothing) {
  Rng rng(1);
  EXPECT_TRUE(assemble_training_set(filled_buffer(1, 5), Bounds{}, 200, rng).empty());
}

TEST(Assembly, CountsPerWindow) {
  Rng rng(1);
  EXPECT_EQ(assemble_training_set(filled_buffer(1, 6), Bounds{}, 200, rng).size(), 1u);
  EXPECT_EQ(count_sequences(filled_buffer(3, 6)), 243u);
  EXPECT_EQ(count_sequences(filled_buffer(1, 25)), 20u);
  EXPECT_EQ(count_sequences(filled_buffer(7, 6)), 16807u);
}

TEST(Assembly, UncappedEnumeratesEveryCombination) {
  Rng rng(1);
  const auto samples = assemble_training_set(filled_buffer(3, 6), Bounds{}, 1000, rng);
  ASSERT_EQ(samples.size(), 243u);
  std::set<std::vector<double>> distinct;
  for (const auto& s : samples) {
    distinct.insert(s.inputs);
    EXPECT_EQ(s.first_period, 0u);
    EXPECT_EQ(s.target_period, 5u);
    EXPECT_DOUBLE_EQ(s.target[0], scale_coordinate(0.5, Bounds{}));
  }
  EXPECT_EQ(distinct.size(), 243u);
}

TEST(Assembly, CapSamplesDistinctSequences) {
  Rng rng(7);
  const auto samples = assemble_training_set(filled_buffer(3, 6), Bounds{}, 200, rng);
  ASSERT_EQ(samples.size(), 200u);
  std::set<std::vector<double>> distinct;
  for (const auto& s : samples) distinct.insert(s.inputs);
  EXPECT_EQ(distinct.size(), 200u);
}

TEST(Assembly, WindowsSpanConsecutivePeriods) {
  SampleBuffer buf(1, 2, std::nullopt);
  for (std::size_t t : {0u, 1u, 2u, 4u, 5u, 6u, 7u}) buf.push(t, {constant(2, 0.0)});
  EXPECT_EQ(buf.windows(), (std::vector<std::size_t>{0, 3, 4}));
}

TEST(Scaling, RoundTrip) {
  const Bounds b;
  EXPECT_EQ(scale_coordinate(-5.0, b), -1.0);
  EXPECT_EQ(scale_coordinate(5.0, b), 1.0);
  EXPECT_EQ(scale_coordinate(0.0, b), 0.0);
  EXPECT_NEAR(unscale_coordinate(scale_coordinate(1.234, b), b), 1.234, 1e-15);
}

TEST(Spawn, SinglePredictionHasNoNoise) {
  const auto buf = filled_buffer(1, 6);
  Rng wrng(3);
  const auto w = MLPWeights::random(2, 5, wrng);
  Rng a(1), b(2);
  const auto pa = predict_and_spawn(w, buf, 1, Bounds{}, 0.1, a);
  const auto pb = predict_and_spawn(w, buf, 1, Bounds{}, 0.1, b);
  ASSERT_EQ(pa.size(), 1u);
  EXPECT_EQ(pa, pb);
}

TEST(Spawn, NoiseWithinTenPercentOfRange) {
  const auto buf = filled_buffer(1, 6, 30);
  const MLPWeights w(30, 5);  // exact prediction is the box centre
  Rng rng(4);
  const auto ps = predict_and_spawn(w, buf, 20, Bounds{}, 0.1, rng);
  ASSERT_EQ(ps.size(), 20u);
  double widest = 0.0;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    for (double v : ps[i]) {
      EXPECT_LE(std::abs(v), 1.0);
      widest = std::max(widest, std::abs(v));
    }
  }
  EXPECT_GT(widest, 0.9);
}

TEST(Spawn, ClampedToBounds) {
  const auto buf = filled_buffer(1, 6, 3);
  MLPWeights w(3, 5);
  w.b2 = {1.24, -3.0, 0.0};  // scaled 1.24 unscales to 6.2
  Rng rng(4);
  const auto ps = predict_and_spawn(w, buf, 4, Bounds{}, 0.1, rng);
  EXPECT_EQ(ps[0][0], 5.0);
  EXPECT_EQ(ps[0][1], -5.0);
  for (const auto& p : ps) {
    for (double v : p) {
      EXPECT_GE(v, -5.0);
      EXPECT_LE(v, 5.0);
    }
  }
}

TEST(Spawn, ShortBufferGivesNothing) {
  Rng rng(1);
  EXPECT_TRUE(predict_and_spawn(MLPWeights(2, 5), filled_buffer(1, 4), 3, Bounds{}, 0.1, rng).empty());
}

// With k = 1 and min_batch = 20 the first training set large enough exists
// once 25 periods (20 windows) are buffered.
TEST(Predictor, FirstTrainingAfterTwentyFivePeriods) {
  PredictorConfig cfg;
  cfg.k = 1;
  cfg.window = std::nullopt;
  Rng init(1), rng(2);
  Predictor p(cfg, 4, Bounds{}, init);
  const auto pop = random_population(4, 5);
  for (std::size_t t = 0; t < 30; ++t) {
    p.record_period(pop, t);
    const auto outcome = p.train_if_ready(rng);
    EXPECT_EQ(outcome.trained, t + 1 >= 25) << "after period " << t;
    EXPECT_EQ(!p.predict(3, rng).empty(), t + 1 >= 25);
  }
}

}  // namespace
}  // namespace dyno
