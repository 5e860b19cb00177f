#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dyno/rng.hpp"

namespace dyno {

/// Two-layer optimum predictor. Layer one (d -> 4, ReLU) is shared across the
/// n_t history inputs; the concatenated hidden codes feed a linear layer
/// (4 n_t -> d).
///
/// Storage is row-major: w1 is d x hidden, w2 is (hidden n_t) x d.
struct MLPWeights {
  static constexpr std::size_t kHidden = 4;

  std::size_t dimension = 0;
  std::size_t history = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  MLPWeights() = default;
  MLPWeights(std::size_t dimension, std::size_t history);

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
  static MLPWeights random(std::size_t dimension, std::size_t history, Rng& rng);

  std::size_t concat_size() const { return kHidden * history; }
  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Flat view in W1, b1, W2, b2 order.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);

  nlohmann::json to_json() const;
  static MLPWeights from_json(const nlohmann::json& j);
};

/// One training pair in the network's scaled coordinates. `inputs` holds the
/// n_t history positions back to back, oldest first.
struct TrainingSample {
  std::vector<double> inputs;
  std::vector<double> target;
  std::size_t first_period = 0;
  std::size_t target_period = 0;
};

/// Throws std::logic_error when the weights contain non-finite values.
std::vector<double> forward(const MLPWeights& w, std::span<const double> inputs);

/// Mean squared error of one sample: (1/d) * |out - target|^2. When `grad` is
/// non-null the parameter gradient scaled by `grad_scale` is accumulated into
/// it (same shape as `w`).
double sample_loss(const MLPWeights& w, const TrainingSample& sample,
                   MLPWeights* grad = nullptr, double grad_scale = 1.0);

double mean_loss(const MLPWeights& w, std::span<const TrainingSample> samples);

struct AdamState {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t steps = 0;
  std::vector<double> m;
  std::vector<double> v;

  void step(MLPWeights& w, const MLPWeights& grad);
};

struct TrainResult {
  std::vector<double> loss_history;  // mean loss per epoch
  std::size_t batches = 0;
  bool aborted = false;              // non-finite loss, weights rolled back
};

/// Mini-batch training on MSE with per-epoch shuffling.
TrainResult train(MLPWeights& w, AdamState& adam,
                  std::span<const TrainingSample> samples, std::size_t epochs,
                  std::size_t batch_size, Rng& rng);

}  // namespace dyno
