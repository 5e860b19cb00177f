#include "dyno/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyno {

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

PrincipalAxis principal_axis(std::span<const std::vector<double>> points,
                             double tolerance, std::size_t max_iterations) {
  if (points.size() < 2) throw std::invalid_argument("PCA needs at least two points");
  const std::size_t d = points.front().size();
  const double n = static_cast<double>(points.size());

  PrincipalAxis axis;
  axis.mean.assign(d, 0.0);
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("PCA points differ in length");
    for (std::size_t j = 0; j < d; ++j) axis.mean[j] += p[j] / n;
  }

  std::vector<double> cov(d * d, 0.0);
  for (const auto& p : points) {
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = p[a] - axis.mean[a];
      for (std::size_t b = a; b < d; ++b) {
        cov[a * d + b] += ca * (p[b] - axis.mean[b]);
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= n - 1.0;
      cov[b * d + a] = cov[a * d + b];
    }
  }

  auto multiply = [&](const std::vector<double>& v) {
    std::vector<double> out(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) out[a] += cov[a * d + b] * v[b];
    }
    return out;
  };

  // Start from the covariance column with the largest norm; it has a
  // component along the dominant eigenvector whenever the covariance is
  // nonzero.
  std::vector<double> v(d, 0.0);
  double best = 0.0;
  for (std::size_t b = 0; b < d; ++b) {
    std::vector<double> col(d);
    for (std::size_t a = 0; a < d; ++a) col[a] = cov[a * d + b];
    const double nc = norm(col);
    if (nc > best) {
      best = nc;
      v = std::move(col);
    }
  }
  axis.direction.assign(d, 0.0);
  if (best == 0.0) {
    axis.converged = true;
    return axis;
  }
  for (double& x : v) x /= best;

  for (axis.iterations = 1; axis.iterations <= max_iterations; ++axis.iterations) {
    auto w = multiply(v);
    const double nw = norm(w);
    if (nw == 0.0) break;
    double change = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      w[j] /= nw;
      change += (w[j] - v[j]) * (w[j] - v[j]);
    }
    v = std::move(w);
    if (std::sqrt(change) <= tolerance) {
      axis.converged = true;
      break;
    }
  }

  const double peak = *std::max_element(v.begin(), v.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  for (double x : v) {
    if (std::abs(x) > 1e-12 * std::abs(peak)) {
      if (x < 0) {
        for (double& y : v) y = -y;
      }
      break;
    }
  }
  const auto cv = multiply(v);
  for (std::size_t j = 0; j < d; ++j) axis.eigenvalue += v[j] * cv[j];
  axis.direction = std::move(v);
  return axis;
}

std::vector<double> pca_project_1d(std::span<const std::vector<double>> points) {
  const auto axis = principal_axis(points);
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      s += (p[j] - axis.mean[j]) * axis.direction[j];
    }
    out.push_back(s);
  }
  const auto first = std::find_if(out.begin(), out.end(), [](double v) { return v != 0.0; });
  if (first != out.end() && *first < 0.0) {
    for (double& v : out) v = -v;
  }
  return out;
}

}  // namespace dyno
