#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "dyno/de.hpp"
#include "dyno/mlp.hpp"
#include "dyno/problems.hpp"
#include "dyno/rng.hpp"

namespace dyno {

struct PredictorConfig {
  std::size_t k = 3;
  std::size_t history = 5;                 // n_t
  std::optional<std::size_t> window = 5;   // n_w; nullopt keeps every period
  std::size_t min_batch = 20;
  std::size_t sample_cap = 200;
  std::size_t epochs = 3;
  std::size_t batch_size = 4;
  double learning_rate = 0.01;
  double noise_fraction = 0.1;             // of (U - L), per coordinate

  void validate(std::size_t pop_size) const;
};

/// Per-period archive of the k best positions, best first.
class SampleBuffer {
 public:
  struct Entry {
    std::size_t period = 0;
    std::vector<std::vector<double>> positions;
  };

  SampleBuffer(std::size_t k, std::size_t history,
               std::optional<std::size_t> window);

  /// Appends the k compare-best distinct positions of `pop` for period t.
  /// Periods must be recorded in increasing order; a repeat throws
  /// std::logic_error.
  void record_period(const Population& pop, std::size_t t);

  /// Raw append, positions already ordered best first.
  void push(std::size_t t, std::vector<std::vector<double>> positions);

  const std::deque<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t k() const { return k_; }
  std::size_t history() const { return history_; }

  /// Start offsets of every (n_t inputs + 1 target) run of consecutive
  /// periods held in the buffer.
  std::vector<std::size_t> windows() const;

 private:
  std::size_t k_;
  std::size_t history_;
  std::optional<std::size_t> window_;
  std::deque<Entry> entries_;
};

/// Maps [L,U] onto [-1,1] and back.
double scale_coordinate(double v, const Bounds& bounds);
double unscale_coordinate(double v, const Bounds& bounds);

/// Number of input sequences before capping: windows * k^n_t.
std::size_t count_sequences(const SampleBuffer& buffer);

/// Every window contributes one sequence per choice of a stored position in
/// each input period; the target is the best position of the next period. A
/// uniform random subset of `sample_cap` sequences is kept when the total
/// exceeds the cap. Fewer than n_t + 1 periods yields an empty set.
std::vector<TrainingSample> assemble_training_set(const SampleBuffer& buffer,
                                                  const Bounds& bounds,
                                                  std::size_t sample_cap,
                                                  Rng& rng);

/// Runs the network on the best positions of the last n_t periods and returns
/// the exact prediction followed by n_p - 1 noisy copies, all clamped into
/// bounds. Returns an empty list when the buffer is too short.
std::vector<std::vector<double>> predict_and_spawn(
    const MLPWeights& weights, const SampleBuffer& buffer, std::size_t n_p,
    const Bounds& bounds, double noise_fraction, Rng& rng);

/// One run's predictor: buffer, network and optimizer state.
class Predictor {
 public:
  struct TrainOutcome {
    std::size_t samples = 0;
    bool trained = false;
    TrainResult result;
  };

  Predictor(PredictorConfig config, std::size_t dimension, Bounds bounds,
            Rng& init_rng);

  const PredictorConfig& config() const { return config_; }
  const SampleBuffer& buffer() const { return buffer_; }
  const MLPWeights& weights() const { return weights_; }
  bool ready() const { return trained_once_; }

  void record_period(const Population& pop, std::size_t t) {
    buffer_.record_period(pop, t);
  }

  /// Assembles the training set and trains when it holds >= min_batch
  /// samples.
  TrainOutcome train_if_ready(Rng& rng);

  std::vector<std::vector<double>> predict(std::size_t n_p, Rng& rng) const;

 private:
  PredictorConfig config_;
  Bounds bounds_;
  SampleBuffer buffer_;
  MLPWeights weights_;
  AdamState adam_;
  bool trained_once_ = false;
};

}  // namespace dyno
