#pragma once

#include <span>
#include <vector>

namespace dyno {

struct KruskalWallisResult {
  double h = 0.0;
  double p = 1.0;
};

/// Average ranks (1-based) of the pooled observations; ties share the mean
/// rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Rank-based H statistic with tie correction; p from the chi-square
/// survival function with (groups - 1) degrees of freedom.
KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Dunn's pairwise z tests on the pooled ranks, Bonferroni adjusted (p times
/// the number of pairs, clipped at 1). Symmetric with unit diagonal.
std::vector<std::vector<double>> bonferroni_pairwise(
    std::span<const std::vector<double>> groups);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double x, double dof);

}  // namespace dyno
