#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dyno/pca.hpp"

namespace dyno {
namespace {

using Points = std::vector<std::vector<double>>;

double sample_variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double top_eigenvalue(const Points& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const auto d = static_cast<Eigen::Index>(pts[0].size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  return es.eigenvalues().maxCoeff();
}

Points random_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Points pts(n, std::vector<double>(d));
  for (auto& p : pts) {
    for (std::size_t j = 0; j < d; ++j) p[j] = g(rng) * (1.0 + 0.1 * static_cast<double>(j));
  }
  return pts;
}

TEST(Pca, CollinearPoints) {
  const Points pts{{0, 0}, {1, 1}, {2, 2}};
  const auto proj = pca_project_1d(pts);
  ASSERT_EQ(proj.size(), 3u);
  EXPECT_NEAR(proj[0], std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(proj[1], 0.0, 1e-12);
  EXPECT_NEAR(proj[2], -std::numbers::sqrt2, 1e-12);
}

TEST(Pca, IdenticalPointsProjectToZero) {
  const Points pts(5, std::vector<double>{1.0, -2.0, 3.0});
  for (double v : pca_project_1d(pts)) EXPECT_EQ(v, 0.0);
}

TEST(Pca, DirectionSignRule) {
  const Points pts{{2, -2}, {1, -1}, {0, 0}};
  const auto axis = principal_axis(pts);
  EXPECT_GT(axis.direction[0], 0.0);
  EXPECT_LT(axis.direction[1], 0.0);
}

TEST(Pca, FirstNonzeroProjectionPositive) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto pts = random_cloud(20, 4, seed);
    const auto proj = pca_project_1d(pts);
    EXPECT_GT(proj.front(), 0.0);
    std::reverse(pts.begin(), pts.end());
    EXPECT_GT(pca_project_1d(pts).front(), 0.0);
  }
  const Points leading_mean{{1, 1}, {0, 0}, {2, 2}};
  const auto proj = pca_project_1d(leading_mean);
  EXPECT_EQ(proj[0], 0.0);
  EXPECT_GT(proj[1], 0.0);
}

TEST(Pca, VarianceMatchesDenseEigensolver) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pts = random_cloud(60, 30, seed);
    const auto proj = pca_project_1d(pts);
    const auto axis = principal_axis(pts);
    EXPECT_TRUE(axis.converged);
    const double oracle_value = top_eigenvalue(pts);
    EXPECT_NEAR(sample_variance(proj), oracle_value, 1e-8);
    EXPECT_NEAR(axis.eigenvalue, oracle_value, 1e-8);
  }
}

// Rotating the cloud leaves the projected variance unchanged.
TEST(Pca, RotationInvariantVariance) {
  auto pts = random_cloud(40, 3, 9);
  const double before = sample_variance(pca_project_1d(pts));
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (auto& p : pts) {
    const double x = p[0], y = p[1];
    p[0] = c * x - s * y;
    p[1] = s * x + c * y;
  }
  EXPECT_NEAR(sample_variance(pca_project_1d(pts)), before, 1e-9);
}

}  // namespace
}  // namespace dyno
