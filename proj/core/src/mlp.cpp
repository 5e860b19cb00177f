#include "dyno/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dyno {

MLPWeights::MLPWeights(std::size_t dimension_, std::size_t history_)
    : dimension(dimension_),
      history(history_),
      w1(dimension_ * kHidden, 0.0),
      b1(kHidden, 0.0),
      w2(kHidden * history_ * dimension_, 0.0),
      b2(dimension_, 0.0) {}

MLPWeights MLPWeights::random(std::size_t dimension, std::size_t history,
                              Rng& rng) {
  MLPWeights w(dimension, history);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(dimension));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(w.concat_size()));
  for (double& v : w.w1) v = uniform(rng, -r1, r1);
  for (double& v : w.b1) v = uniform(rng, -r1, r1);
  for (double& v : w.w2) v = uniform(rng, -r2, r2);
  for (double& v : w.b2) v = uniform(rng, -r2, r2);
  return w;
}

std::size_t MLPWeights::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

bool MLPWeights::all_finite() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return ok(w1) && ok(b1) && ok(w2) && ok(b2);
}

std::vector<double> MLPWeights::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto* v : {&w1, &b1, &w2, &b2}) flat.insert(flat.end(), v->begin(), v->end());
  return flat;
}

void MLPWeights::assign_flat(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("flat parameter size mismatch");
  }
  auto it = flat.begin();
  for (auto* v : {&w1, &b1, &w2, &b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
    it += static_cast<std::ptrdiff_t>(v->size());
  }
}

nlohmann::json MLPWeights::to_json() const {
  return {{"dimension", dimension}, {"history", history}, {"hidden", kHidden},
          {"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
}

MLPWeights MLPWeights::from_json(const nlohmann::json& j) {
  MLPWeights w(j.at("dimension").get<std::size_t>(),
               j.at("history").get<std::size_t>());
  w.w1 = j.at("w1").get<std::vector<double>>();
  w.b1 = j.at("b1").get<std::vector<double>>();
  w.w2 = j.at("w2").get<std::vector<double>>();
  w.b2 = j.at("b2").get<std::vector<double>>();
  if (w.flatten().size() != MLPWeights(w.dimension, w.history).parameter_count()) {
    throw std::invalid_argument("weight snapshot has inconsistent shapes");
  }
  return w;
}

namespace {

constexpr std::size_t H = MLPWeights::kHidden;

// Pre-activations and activations of layer one for all history slots.
struct Activations {
  std::vector<double> pre;     // n_t * H
  std::vector<double> hidden;  // n_t * H, after ReLU
  std::vector<double> out;     // d
};

Activations run(const MLPWeights& w, std::span<const double> inputs) {
  const std::size_t d = w.dimension;
  if (inputs.size() != d * w.history) {
    throw std::invalid_argument("predictor input must hold n_t positions of length d");
  }
  Activations a;
  a.pre.assign(w.concat_size(), 0.0);
  a.hidden.assign(w.concat_size(), 0.0);
  for (std::size_t s = 0; s < w.history; ++s) {
    const double* x = inputs.data() + s * d;
    for (std::size_t h = 0; h < H; ++h) {
      double z = w.b1[h];
      for (std::size_t j = 0; j < d; ++j) z += x[j] * w.w1[j * H + h];
      a.pre[s * H + h] = z;
      a.hidden[s * H + h] = z > 0.0 ? z : 0.0;
    }
  }
  a.out = w.b2;
  for (std::size_t k = 0; k < w.concat_size(); ++k) {
    const double hk = a.hidden[k];
    if (hk == 0.0) continue;
    const double* row = w.w2.data() + k * d;
    for (std::size_t o = 0; o < d; ++o) a.out[o] += hk * row[o];
  }
  return a;
}

}  // namespace

std::vector<double> forward(const MLPWeights& w, std::span<const double> inputs) {
  if (!w.all_finite()) throw std::logic_error("non-finite predictor weights");
  return run(w, inputs).out;
}

double sample_loss(const MLPWeights& w, const TrainingSample& sample,
                   MLPWeights* grad, double grad_scale) {
  const std::size_t d = w.dimension;
  if (sample.target.size() != d) {
    throw std::invalid_argument("target length must equal d");
  }
  const Activations a = run(w, sample.inputs);

  std::vector<double> err(d);
  double loss = 0.0;
  for (std::size_t o = 0; o < d; ++o) {
    err[o] = a.out[o] - sample.target[o];
    loss += err[o] * err[o];
  }
  loss /= static_cast<double>(d);
  if (grad == nullptr) return loss;

  // dL/dout = 2 (out - y) / d
  const double c = 2.0 * grad_scale / static_cast<double>(d);
  std::vector<double> g_out(d);
  for (std::size_t o = 0; o < d; ++o) g_out[o] = c * err[o];

  for (std::size_t o = 0; o < d; ++o) grad->b2[o] += g_out[o];
  std::vector<double> g_hidden(w.concat_size(), 0.0);
  for (std::size_t k = 0; k < w.concat_size(); ++k) {
    const double* row = w.w2.data() + k * d;
    double* grow = grad->w2.data() + k * d;
    double acc = 0.0;
    for (std::size_t o = 0; o < d; ++o) {
      grow[o] += a.hidden[k] * g_out[o];
      acc += row[o] * g_out[o];
    }
    g_hidden[k] = a.pre[k] > 0.0 ? acc : 0.0;
  }
  for (std::size_t s = 0; s < w.history; ++s) {
    const double* x = sample.inputs.data() + s * d;
    for (std::size_t h = 0; h < H; ++h) {
      const double g = g_hidden[s * H + h];
      if (g == 0.0) continue;
      grad->b1[h] += g;
      for (std::size_t j = 0; j < d; ++j) grad->w1[j * H + h] += g * x[j];
    }
  }
  return loss;
}

double mean_loss(const MLPWeights& w, std::span<const TrainingSample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) total += sample_loss(w, s);
  return total / static_cast<double>(samples.size());
}

void AdamState::step(MLPWeights& w, const MLPWeights& grad) {
  auto params = w.flatten();
  const auto g = grad.flatten();
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
    steps = 0;
  }
  ++steps;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    params[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
  }
  w.assign_flat(params);
}

TrainResult train(MLPWeights& w, AdamState& adam,
                  std::span<const TrainingSample> samples, std::size_t epochs,
                  std::size_t batch_size, Rng& rng) {
  if (samples.empty()) throw std::invalid_argument("training needs >= 1 sample");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");

  const MLPWeights saved_weights = w;
  const AdamState saved_adam = adam;
  TrainResult result;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(order.size(), begin + batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      MLPWeights grad(w.dimension, w.history);
      for (std::size_t i = begin; i < end; ++i) {
        epoch_loss += sample_loss(w, samples[order[i]], &grad, scale);
      }
      adam.step(w, grad);
      ++result.batches;
      if (!std::isfinite(epoch_loss) || !w.all_finite()) {
        w = saved_weights;
        adam = saved_adam;
        result.aborted = true;
        return result;
      }
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

}  // namespace dyno
