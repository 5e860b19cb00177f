#include "dyno/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace dyno {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

double chi_square_survival(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

namespace {

struct Pooled {
  std::vector<double> rank_sums;
  std::vector<std::size_t> sizes;
  double n = 0.0;
  double tie_sum = 0.0;  // sum over tie groups of (t^3 - t)
};

Pooled pool(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw std::invalid_argument("need at least two groups");
  std::vector<double> all;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("every group needs a sample");
    for (double v : g) {
      if (std::isnan(v)) throw std::invalid_argument("NaN observation");
      all.push_back(v);
    }
  }
  const auto ranks = average_ranks(all);

  Pooled p;
  p.n = static_cast<double>(all.size());
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += ranks[offset + i];
    p.rank_sums.push_back(s);
    p.sizes.push_back(g.size());
    offset += g.size();
  }

  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double t = static_cast<double>(j - i);
    p.tie_sum += t * t * t - t;
    i = j;
  }
  return p;
}

}  // namespace

KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  const Pooled p = pool(groups);
  const double n = p.n;
  const double correction = 1.0 - p.tie_sum / (n * n * n - n);
  if (correction <= 0.0) return {0.0, 1.0};  // every observation identical

  double sum = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    sum += p.rank_sums[i] * p.rank_sums[i] / static_cast<double>(p.sizes[i]);
  }
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  const double h_clamped = std::max(0.0, h);
  return {h_clamped,
          chi_square_survival(h_clamped, static_cast<double>(groups.size() - 1))};
}

std::vector<std::vector<double>> bonferroni_pairwise(
    std::span<const std::vector<double>> groups) {
  const Pooled p = pool(groups);
  const std::size_t g = groups.size();
  const double pairs = static_cast<double>(g * (g - 1) / 2);
  const double n = p.n;
  const double variance = n * (n + 1.0) / 12.0 - p.tie_sum / (12.0 * (n - 1.0));

  std::vector<std::vector<double>> out(g, std::vector<double>(g, 1.0));
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i + 1; j < g; ++j) {
      double adjusted = 1.0;
      if (variance > 0.0) {
        const double ni = static_cast<double>(p.sizes[i]);
        const double nj = static_cast<double>(p.sizes[j]);
        const double diff = p.rank_sums[i] / ni - p.rank_sums[j] / nj;
        const double z = diff / std::sqrt(variance * (1.0 / ni + 1.0 / nj));
        const double raw = std::erfc(std::abs(z) / std::sqrt(2.0));
        adjusted = std::min(1.0, raw * pairs);
      }
      out[i][j] = out[j][i] = adjusted;
    }
  }
  return out;
}

}  // namespace dyno
