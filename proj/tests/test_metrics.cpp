#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dyno/metrics.hpp"
#include "oracles.hpp"

namespace dyno {
namespace {

using oracle::entry;
using oracle::row;

TEST(Metrics, MatchBruteForceAndHandValues) {
  for (const auto& log : oracle::synthetic_logs()) {
    SCOPED_TRACE(log.name);
    const auto ref = oracle::brute_force(log.rows, log.table);
    EXPECT_NEAR(mof(log.rows, log.table), ref.mof, 1e-12);
    EXPECT_NEAR(arr(log.rows, log.table), ref.arr, 1e-12);
    EXPECT_NEAR(success_rate(log.rows, log.table), ref.sr, 1e-12);
    if (!std::isnan(log.mof)) {
      EXPECT_NEAR(ref.mof, log.mof, 1e-12);
      EXPECT_NEAR(ref.arr, log.arr, 1e-12);
      EXPECT_NEAR(ref.sr, log.sr, 1e-12);
    }
  }
}

TEST(Mof, MeanOfErrors) {
  const BestKnownTable table({entry(0, 0.0)});
  const std::vector<GenerationRecord> rows{row(0, 1, 1.0), row(0, 2, 3.0)};
  EXPECT_DOUBLE_EQ(mof(rows, table), 2.0);
  const std::vector<GenerationRecord> exact{row(0, 1, 0.0), row(0, 2, 0.0)};
  EXPECT_EQ(mof(exact, table), 0.0);
}

TEST(Mof, MissingEntryIsHardError) {
  const BestKnownTable table({entry(0, 0.0)});
  const std::vector<GenerationRecord> rows{row(1, 1, 1.0)};
  EXPECT_THROW(mof(rows, table), std::out_of_range);
}

TEST(Arr, DegenerateCases) {
  const BestKnownTable table({entry(0, 1.0)});
  EXPECT_EQ(arr(std::vector{row(0, 1, 1.0), row(0, 2, 1.0)}, table), 1.0);
  EXPECT_EQ(arr(std::vector{row(0, 1, 3.0), row(0, 2, 3.0)}, table), 0.0);
}

TEST(SuccessRate, Examples) {
  const BestKnownTable ten({entry(0, 10.0)});
  EXPECT_EQ(success_rate(std::vector{row(0, 1, 10.5)}, ten), 1.0);
  EXPECT_EQ(success_rate(std::vector{row(0, 1, 0.0, false)}, ten), 0.0);
  const BestKnownTable zero({entry(0, 0.0)});
  EXPECT_EQ(success_rate(std::vector{row(0, 1, 5e-5)}, zero), 1.0);
  EXPECT_EQ(success_rate(std::vector{row(0, 1, 2e-4)}, zero), 0.0);
}

TEST(SuccessRate, DenominatorIsTableSize) {
  const BestKnownTable table({entry(0, 1.0), entry(1, 1.0), entry(2, 1.0), entry(3, 1.0)});
  EXPECT_EQ(success_rate(std::vector{row(0, 1, 1.0), row(1, 1, 1.0)}, table), 0.5);
}

TEST(SuccessRate, MonotoneInEpsilon) {
  for (const auto& log : oracle::synthetic_logs()) {
    double prev = 0.0;
    for (double eps = 0.001; eps < 2.0; eps *= 1.5) {
      const double sr = success_rate(log.rows, log.table, eps);
      EXPECT_GE(sr, prev) << log.name;
      prev = sr;
    }
  }
}

TEST(MofNorm, Examples) {
  EXPECT_EQ(mof_norm(std::vector{2.0, 4.0, 8.0}), (std::vector{1.0, 2.0, 4.0}));
  EXPECT_EQ(mof_norm(std::vector{3.0, 3.0}), (std::vector{1.0, 1.0}));
  EXPECT_EQ(mof_norm(std::vector{7.5}), (std::vector{1.0}));
  EXPECT_THROW(mof_norm(std::vector{1.0, 0.0}), std::invalid_argument);
}

}  // namespace
}  // namespace dyno
