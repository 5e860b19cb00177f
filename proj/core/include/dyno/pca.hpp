#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dyno {

struct PrincipalAxis {
  std::vector<double> mean;
  std::vector<double> direction;  // unit length, first nonzero entry > 0
  double eigenvalue = 0.0;        // sample variance along direction
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dominant eigenvector of the sample covariance by power iteration.
PrincipalAxis principal_axis(std::span<const std::vector<double>> points,
                             double tolerance = 1e-10,
                             std::size_t max_iterations = 10000);

/// Signed projections of the centered points onto the first principal axis.
/// Signs are flipped so the first nonzero projection is positive. All zeros
/// when the points coincide.
std::vector<double> pca_project_1d(std::span<const std::vector<double>> points);

}  // namespace dyno
