#include "dyno/predictor.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace dyno {

void PredictorConfig::validate(std::size_t pop_size) const {
  if (k == 0 || k > pop_size) throw std::invalid_argument("k must lie in [1, NP]");
  if (history == 0) throw std::invalid_argument("n_t must be positive");
  if (window && *window == 0) throw std::invalid_argument("n_w must be positive");
  if (sample_cap == 0) throw std::invalid_argument("sample_cap must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (noise_fraction < 0.0) throw std::invalid_argument("noise must be >= 0");
}

SampleBuffer::SampleBuffer(std::size_t k, std::size_t history,
                           std::optional<std::size_t> window)
    : k_(k), history_(history), window_(window) {
  if (k == 0 || history == 0) throw std::invalid_argument("k and n_t must be positive");
}

void SampleBuffer::record_period(const Population& pop, std::size_t t) {
  const auto order = rank_members(pop);
  const std::size_t want = std::min(k_, pop.size());
  std::vector<std::vector<double>> picked;
  std::vector<bool> used(pop.size(), false);
  for (std::size_t idx : order) {
    if (picked.size() == want) break;
    const auto& pos = pop.members[idx].position;
    if (std::find(picked.begin(), picked.end(), pos) == picked.end()) {
      picked.push_back(pos);
      used[idx] = true;
    }
  }
  // A converged population may have fewer distinct points than k.
  for (std::size_t idx : order) {
    if (picked.size() == want) break;
    if (!used[idx]) picked.push_back(pop.members[idx].position);
  }
  push(t, std::move(picked));
}

void SampleBuffer::push(std::size_t t, std::vector<std::vector<double>> positions) {
  if (!entries_.empty() && t <= entries_.back().period) {
    throw std::logic_error("period already recorded or out of order");
  }
  entries_.push_back({t, std::move(positions)});
  if (window_) {
    while (entries_.size() > *window_ + history_) entries_.pop_front();
  }
}

std::vector<std::size_t> SampleBuffer::windows() const {
  std::vector<std::size_t> starts;
  if (entries_.size() < history_ + 1) return starts;
  for (std::size_t s = 0; s + history_ < entries_.size(); ++s) {
    bool consecutive = true;
    for (std::size_t j = 1; j <= history_; ++j) {
      if (entries_[s + j].period != entries_[s].period + j) {
        consecutive = false;
        break;
      }
    }
    if (consecutive) starts.push_back(s);
  }
  return starts;
}

double scale_coordinate(double v, const Bounds& bounds) {
  return 2.0 * (v - bounds.lower) / bounds.width() - 1.0;
}

double unscale_coordinate(double v, const Bounds& bounds) {
  return bounds.lower + (v + 1.0) * 0.5 * bounds.width();
}

namespace {

std::size_t combinations(const SampleBuffer& buffer, std::size_t start) {
  std::size_t n = 1;
  for (std::size_t j = 0; j < buffer.history(); ++j) {
    n *= buffer.entries()[start + j].positions.size();
  }
  return n;
}

TrainingSample decode(const SampleBuffer& buffer, std::size_t start,
                      std::size_t combo, const Bounds& bounds) {
  const auto& entries = buffer.entries();
  TrainingSample s;
  s.first_period = entries[start].period;
  s.target_period = entries[start + buffer.history()].period;

  // Mixed-radix digits, least significant digit on the newest input period.
  std::vector<std::size_t> choice(buffer.history());
  for (std::size_t j = buffer.history(); j-- > 0;) {
    const std::size_t radix = entries[start + j].positions.size();
    choice[j] = combo % radix;
    combo /= radix;
  }
  for (std::size_t j = 0; j < buffer.history(); ++j) {
    for (double v : entries[start + j].positions[choice[j]]) {
      s.inputs.push_back(scale_coordinate(v, bounds));
    }
  }
  for (double v : entries[start + buffer.history()].positions.front()) {
    s.target.push_back(scale_coordinate(v, bounds));
  }
  return s;
}

}  // namespace

std::size_t count_sequences(const SampleBuffer& buffer) {
  std::size_t total = 0;
  for (std::size_t start : buffer.windows()) total += combinations(buffer, start);
  return total;
}

std::vector<TrainingSample> assemble_training_set(const SampleBuffer& buffer,
                                                  const Bounds& bounds,
                                                  std::size_t sample_cap,
                                                  Rng& rng) {
  const auto starts = buffer.windows();
  std::vector<std::size_t> offsets;  // cumulative sequence counts
  std::size_t total = 0;
  for (std::size_t start : starts) {
    offsets.push_back(total);
    total += combinations(buffer, start);
  }

  std::vector<std::size_t> chosen;
  if (total <= sample_cap) {
    chosen.resize(total);
    for (std::size_t i = 0; i < total; ++i) chosen[i] = i;
  } else {
    // Floyd's sampling of sample_cap distinct indices out of total.
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = total - sample_cap; j < total; ++j) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      chosen.push_back(seen.insert(r).second ? r : (seen.insert(j), j));
    }
    std::sort(chosen.begin(), chosen.end());
  }

  std::vector<TrainingSample> samples;
  samples.reserve(chosen.size());
  std::size_t w = 0;
  for (std::size_t idx : chosen) {
    while (w + 1 < offsets.size() && offsets[w + 1] <= idx) ++w;
    samples.push_back(decode(buffer, starts[w], idx - offsets[w], bounds));
  }
  return samples;
}

std::vector<std::vector<double>> predict_and_spawn(
    const MLPWeights& weights, const SampleBuffer& buffer, std::size_t n_p,
    const Bounds& bounds, double noise_fraction, Rng& rng) {
  const std::size_t n_t = buffer.history();
  if (buffer.size() < n_t || n_p == 0) return {};

  std::vector<double> inputs;
  const auto& entries = buffer.entries();
  for (std::size_t j = entries.size() - n_t; j < entries.size(); ++j) {
    for (double v : entries[j].positions.front()) {
      inputs.push_back(scale_coordinate(v, bounds));
    }
  }
  auto exact = forward(weights, inputs);
  for (double& v : exact) v = bounds.clamp(unscale_coordinate(v, bounds));

  std::vector<std::vector<double>> out;
  out.reserve(n_p);
  out.push_back(exact);
  const double amplitude = noise_fraction * bounds.width();
  for (std::size_t i = 1; i < n_p; ++i) {
    auto noisy = exact;
    for (double& v : noisy) v = bounds.clamp(v + uniform(rng, -amplitude, amplitude));
    out.push_back(std::move(noisy));
  }
  return out;
}

Predictor::Predictor(PredictorConfig config, std::size_t dimension,
                     Bounds bounds, Rng& init_rng)
    : config_(config),
      bounds_(bounds),
      buffer_(config.k, config.history, config.window),
      weights_(MLPWeights::random(dimension, config.history, init_rng)) {
  adam_.learning_rate = config.learning_rate;
}

Predictor::TrainOutcome Predictor::train_if_ready(Rng& rng) {
  TrainOutcome outcome;
  const auto samples =
      assemble_training_set(buffer_, bounds_, config_.sample_cap, rng);
  outcome.samples = samples.size();
  if (samples.empty() || samples.size() < config_.min_batch) return outcome;

  outcome.result = train(weights_, adam_, samples, config_.epochs,
                         config_.batch_size, rng);
  outcome.trained = !outcome.result.aborted;
  trained_once_ = trained_once_ || outcome.trained;
  return outcome;
}

std::vector<std::vector<double>> Predictor::predict(std::size_t n_p,
                                                    Rng& rng) const {
  if (!trained_once_) return {};
  return predict_and_spawn(weights_, buffer_, n_p, bounds_,
                           config_.noise_fraction, rng);
}

}  // namespace dyno
