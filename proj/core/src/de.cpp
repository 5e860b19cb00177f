#include "dyno/de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dyno {

void DEParams::validate() const {
  if (pop_size < 4) {
    throw std::invalid_argument("DE needs at least 4 members (NP >= 4)");
  }
  if (!(cr >= 0.0 && cr <= 1.0)) {
    throw std::invalid_argument("CR must lie in [0, 1]");
  }
  if (!(f_min > 0.0 && f_min <= f_max && f_max <= 2.0)) {
    throw std::invalid_argument("F range must lie in (0, 2]");
  }
  if (!(bounds.lower < bounds.upper)) {
    throw std::invalid_argument("bounds must satisfy L < U");
  }
}

std::weak_ordering compare(double a_objective, double a_violation,
                           double b_objective, double b_violation) {
  if (std::isnan(a_objective) || std::isnan(a_violation) ||
      std::isnan(b_objective) || std::isnan(b_violation)) {
    throw std::invalid_argument("NaN in fitness comparison");
  }
  const bool a_feasible = a_violation == 0.0;
  const bool b_feasible = b_violation == 0.0;
  if (a_feasible != b_feasible) {
    return a_feasible ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  if (a_feasible) return std::weak_order(a_objective, b_objective);
  return std::weak_order(a_violation, b_violation);
}

std::vector<std::size_t> rank_members(const Population& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare(pop.members[a], pop.members[b]) < 0;
  });
  return order;
}

std::vector<double> mutant_vector(std::span<const double> base,
                                  std::span<const double> a,
                                  std::span<const double> b, double scale,
                                  const Bounds& bounds) {
  std::vector<double> v(base.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = bounds.clamp(base[j] + scale * (a[j] - b[j]));
  }
  return v;
}

std::vector<double> mutate(const Population& pop, std::size_t i,
                           const DEParams& params, Rng& rng) {
  const std::size_t np = pop.size();
  if (np < 4) throw std::invalid_argument("DE needs at least 4 members");

  std::size_t r0, r1, r2;
  do { r0 = uniform_index(rng, np); } while (r0 == i);
  do { r1 = uniform_index(rng, np); } while (r1 == i || r1 == r0);
  do { r2 = uniform_index(rng, np); } while (r2 == i || r2 == r0 || r2 == r1);

  const double scale = uniform(rng, params.f_min, params.f_max);
  return mutant_vector(pop.members[r0].position, pop.members[r1].position,
                       pop.members[r2].position, scale, params.bounds);
}

std::vector<double> binomial_crossover(std::span<const double> target,
                                       std::span<const double> mutant,
                                       double cr, std::size_t forced,
                                       std::span<const double> draws) {
  if (target.size() != mutant.size() || draws.size() != target.size()) {
    throw std::invalid_argument("crossover length mismatch");
  }
  std::vector<double> u(target.begin(), target.end());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (draws[j] < cr || j == forced) u[j] = mutant[j];
  }
  return u;
}

std::vector<double> crossover(std::span<const double> target,
                              std::span<const double> mutant, double cr,
                              Rng& rng) {
  if (target.size() != mutant.size()) {
    throw std::invalid_argument("crossover length mismatch");
  }
  const std::size_t forced = uniform_index(rng, target.size());
  std::vector<double> draws(target.size());
  for (double& r : draws) r = uniform(rng, 0.0, 1.0);
  return binomial_crossover(target, mutant, cr, forced, draws);
}

Individual make_individual(std::vector<double> position, Evaluator& eval) {
  const Fitness fit = eval.evaluate(position);
  return Individual{std::move(position), fit.objective, fit.violation,
                    eval.period()};
}

Population initialize_population(const DEParams& params, std::size_t dimension,
                                 Evaluator& eval, Rng& rng) {
  params.validate();
  Population pop;
  pop.members.reserve(params.pop_size);
  for (std::size_t i = 0; i < params.pop_size; ++i) {
    std::vector<double> x(dimension);
    for (double& v : x) v = uniform(rng, params.bounds.lower, params.bounds.upper);
    pop.members.push_back(make_individual(std::move(x), eval));
  }
  return pop;
}

std::size_t de_generation(Population& pop, const DEParams& params,
                          Evaluator& eval, Rng& rng) {
  std::vector<Individual> next = pop.members;
  std::size_t trials = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (eval.exhausted()) break;
    const auto& target = pop.members[i];
    auto trial = make_individual(
        crossover(target.position, mutate(pop, i, params, rng), params.cr, rng),
        eval);
    ++trials;
    // Incumbent survives exact ties.
    if (compare(trial, target) < 0) next[i] = std::move(trial);
  }
  if (trials > 0) {
    pop.members = std::move(next);
    ++pop.generation;
  }
  return trials;
}

bool detect_change(const Population& pop, Evaluator& eval) {
  if (pop.members.empty()) throw std::invalid_argument("empty population");
  for (std::size_t idx : {std::size_t{0}, pop.size() / 2}) {
    const auto& m = pop.members[idx];
    const Fitness now = eval.evaluate(m.position);
    if (now.objective != m.objective || now.violation != m.violation) {
      return true;
    }
  }
  return false;
}

std::string_view to_string(ReactionMode mode) {
  switch (mode) {
    case ReactionMode::NoNN: return "noNN";
    case ReactionMode::NNW: return "NNW";
    case ReactionMode::NNR: return "NNR";
  }
  return "?";
}

ReactionMode parse_reaction_mode(std::string_view name) {
  if (name == "noNN") return ReactionMode::NoNN;
  if (name == "NNW") return ReactionMode::NNW;
  if (name == "NNR") return ReactionMode::NNR;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

ReactionResult react(Population& pop, ReactionMode mode,
                     std::span<const std::vector<double>> predictions,
                     Evaluator& eval, Rng& rng) {
  ReactionResult result;
  const std::size_t np = pop.size();
  if (predictions.size() > np) {
    throw std::invalid_argument("n_p exceeds population size");
  }

  if (mode != ReactionMode::NoNN && !predictions.empty()) {
    if (mode == ReactionMode::NNW) {
      const auto order = rank_members(pop);
      result.replaced.assign(order.end() - static_cast<std::ptrdiff_t>(predictions.size()),
                             order.end());
    } else {
      std::vector<std::size_t> idx(np);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      // Partial Fisher-Yates: the first n_p slots become a uniform sample.
      for (std::size_t k = 0; k < predictions.size(); ++k) {
        const std::size_t j = k + uniform_index(rng, np - k);
        std::swap(idx[k], idx[j]);
      }
      result.replaced.assign(idx.begin(),
                             idx.begin() + static_cast<std::ptrdiff_t>(predictions.size()));
    }
    for (std::size_t k = 0; k < predictions.size(); ++k) {
      pop.members[result.replaced[k]].position = predictions[k];
    }
  }

  for (auto& m : pop.members) {
    const Fitness fit = eval.evaluate(m.position);
    m.objective = fit.objective;
    m.violation = fit.violation;
    m.evaluated_at = eval.period();
    ++result.evaluations;
  }
  return result;
}

}  // namespace dyno
