#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "dyno/problems.hpp"
#include "dyno/rng.hpp"

namespace dyno {

struct Fitness {
  double objective = 0.0;
  double violation = 0.0;
};

struct Individual {
  std::vector<double> position;
  double objective = 0.0;
  double violation = 0.0;
  std::size_t evaluated_at = 0;

  bool feasible() const { return violation == 0.0; }
};

struct Population {
  std::vector<Individual> members;
  std::size_t generation = 0;

  std::size_t size() const { return members.size(); }
};

struct DEParams {
  std::size_t pop_size = 20;
  double cr = 0.2;
  double f_min = 0.2;
  double f_max = 0.8;
  Bounds bounds;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Source of fitness values for the evolution loop. Implementations decide
/// what an evaluation costs and when the budget runs out.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Fitness evaluate(std::span<const double> x) = 0;
  virtual bool exhausted() const = 0;
  virtual std::size_t period() const = 0;
};

/// Feasibility rules. `less` means a is preferred over b, `equivalent` is an
/// exact tie. Throws std::invalid_argument on NaN input.
std::weak_ordering compare(double a_objective, double a_violation,
                           double b_objective, double b_violation);

inline std::weak_ordering compare(const Individual& a, const Individual& b) {
  return compare(a.objective, a.violation, b.objective, b.violation);
}

/// Member indices ordered best-first under the feasibility rules. Stable, so
/// tied members keep index order.
std::vector<std::size_t> rank_members(const Population& pop);

/// base + F (a - b), clamped into bounds.
std::vector<double> mutant_vector(std::span<const double> base,
                                  std::span<const double> a,
                                  std::span<const double> b, double scale,
                                  const Bounds& bounds);

/// DE/rand/1 mutant for member i with r0, r1, r2, i pairwise distinct and F
/// drawn from [f_min, f_max].
std::vector<double> mutate(const Population& pop, std::size_t i,
                           const DEParams& params, Rng& rng);

/// Binomial crossover with explicit draws: component j comes from the mutant
/// when draws[j] < cr or j == forced.
std::vector<double> binomial_crossover(std::span<const double> target,
                                       std::span<const double> mutant,
                                       double cr, std::size_t forced,
                                       std::span<const double> draws);

std::vector<double> crossover(std::span<const double> target,
                              std::span<const double> mutant, double cr,
                              Rng& rng);

Individual make_individual(std::vector<double> position, Evaluator& eval);

/// Uniform random population in bounds, every member evaluated.
Population initialize_population(const DEParams& params, std::size_t dimension,
                                 Evaluator& eval, Rng& rng);

/// One DE/rand/1/bin generation. Stops early when the evaluator reports an
/// exhausted budget; selections completed so far are kept. Returns the number
/// of trials evaluated.
std::size_t de_generation(Population& pop, const DEParams& params,
                          Evaluator& eval, Rng& rng);

/// Re-evaluates the first and the middle member and reports whether either
/// fitness differs from the cached value. The population is not modified.
bool detect_change(const Population& pop, Evaluator& eval);

enum class ReactionMode { NoNN, NNW, NNR };

std::string_view to_string(ReactionMode mode);
ReactionMode parse_reaction_mode(std::string_view name);

struct ReactionResult {
  std::vector<std::size_t> replaced;
  std::size_t evaluations = 0;
};

/// Change reaction. With no predictions (or in NoNN mode) every member is
/// re-evaluated. Otherwise the predictions overwrite the compare-worst (NNW)
/// or random distinct (NNR) members before the full re-evaluation.
ReactionResult react(Population& pop, ReactionMode mode,
                     std::span<const std::vector<double>> predictions,
                     Evaluator& eval, Rng& rng);

}  // namespace dyno
