#include "dyno/best_known.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dyno/de.hpp"
#include "dyno/rng.hpp"
#include "dyno/run_log.hpp"

namespace dyno {

std::string_view to_string(Provenance p) {
  return p == Provenance::Analytic ? "analytic" : "oracle";
}

BestKnownTable::BestKnownTable(std::vector<BestKnownEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].period != i) {
      throw std::invalid_argument("best-known entries must cover 0..T-1 in order");
    }
  }
}

const BestKnownEntry& BestKnownTable::at(std::size_t t) const {
  if (t >= entries_.size()) {
    throw std::out_of_range("no best-known entry for period " + std::to_string(t));
  }
  return entries_[t];
}

void BestKnownTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::size_t d = entries_.empty() ? 0 : entries_.front().x_star.size();
  out << "t,f_star";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
  out << ",provenance,worst_feasible,low_confidence\n";
  for (const auto& e : entries_) {
    out << e.period << ',' << format_double(e.f_star);
    for (double v : e.x_star) out << ',' << format_double(v);
    out << ',' << to_string(e.provenance) << ',' << format_double(e.worst_feasible)
        << ',' << (e.low_confidence ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

BestKnownTable BestKnownTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 5) throw std::runtime_error("bad best-known header in " + path.string());
  const std::size_t d = columns - 5;

  std::vector<BestKnownEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != columns) {
      throw std::runtime_error("bad best-known row in " + path.string());
    }
    BestKnownEntry e;
    e.period = std::stoul(f[0]);
    e.f_star = std::stod(f[1]);
    for (std::size_t i = 0; i < d; ++i) e.x_star.push_back(std::stod(f[2 + i]));
    if (f[2 + d] == "analytic") {
      e.provenance = Provenance::Analytic;
    } else if (f[2 + d] == "oracle") {
      e.provenance = Provenance::Oracle;
    } else {
      throw std::runtime_error("unknown provenance '" + f[2 + d] + "'");
    }
    e.worst_feasible = std::stod(f[3 + d]);
    e.low_confidence = f[4 + d] == "1";
    entries.push_back(std::move(e));
  }
  return BestKnownTable(std::move(entries));
}

std::vector<double> objective_gradient(const BenchmarkFunction& fn,
                                       std::span<const double> x) {
  std::vector<double> g(x.size(), 0.0);
  switch (fn.kind()) {
    case FunctionKind::Sphere:
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
      break;
    case FunctionKind::Rosenbrock:
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
        g[i + 1] += 200.0 * a;
      }
      break;
    case FunctionKind::Rastrigin:
      for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] = 2.0 * x[i] +
               20.0 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * x[i]);
      }
      break;
  }
  return g;
}

namespace {

// Evaluation-count budget over a fixed period.
class CountingEvaluator final : public Evaluator {
 public:
  CountingEvaluator(const DynamicProblem& p, std::size_t t, std::size_t cap)
      : problem_(p), t_(t), cap_(cap) {}

  Fitness evaluate(std::span<const double> x) override {
    ++used_;
    return {problem_.objective(x, t_), problem_.violation(x, t_)};
  }
  bool exhausted() const override { return used_ >= cap_; }
  std::size_t period() const override { return t_; }

 private:
  const DynamicProblem& problem_;
  std::size_t t_;
  std::size_t cap_;
  std::size_t used_ = 0;
};

// Feasible set of period t as a box intersected with at most one half-space.
struct FeasibleSet {
  const DynamicProblem& problem;
  std::size_t t;

  void project(std::span<const double> y, std::vector<double>& out) const {
    const auto& bounds = problem.bounds();
    if (!problem.constrained()) {
      out.resize(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) out[i] = bounds.clamp(y[i]);
      return;
    }
    const auto& s = problem.schedule();
    if (!project_box_halfspace(y, s.constraint.coefficients, s.constraint_bound(t),
                               bounds, out)) {
      throw std::runtime_error("empty feasible region at period " + std::to_string(t));
    }
  }
};

// Projected gradient descent with Armijo backtracking.
std::vector<double> polish(const DynamicProblem& problem, std::size_t t,
                           std::vector<double> x, std::size_t iterations) {
  const FeasibleSet feasible{problem, t};
  feasible.project(std::vector<double>(x), x);
  double fx = problem.objective(x, t);
  double step = 1e-2;
  std::vector<double> trial;
  for (std::size_t it = 0; it < iterations && step > 1e-14; ++it) {
    // Gradient of the shifted objective equals the static gradient at the
    // shifted point; polishing only runs on static (constrained) cells.
    const auto g = objective_gradient(problem.function(), x);
    bool improved = false;
    while (step > 1e-14) {
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - step * g[i];
      feasible.project(y, trial);
      double decrease = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) decrease += g[i] * (x[i] - trial[i]);
      const double ft = problem.objective(trial, t);
      if (ft <= fx - 1e-4 * decrease && ft < fx) {
        x = trial;
        fx = ft;
        step *= 2.0;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return x;
}

double sample_worst_feasible(const DynamicProblem& problem, std::size_t t,
                             std::size_t samples, Rng& rng) {
  const FeasibleSet feasible{problem, t};
  const auto& bounds = problem.bounds();
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> x(problem.dimension());
  std::vector<double> projected;
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : x) v = uniform(rng, bounds.lower, bounds.upper);
    if (problem.violation(x, t) == 0.0) {
      worst = std::max(worst, problem.objective(x, t));
    } else {
      feasible.project(x, projected);
      if (problem.violation(projected, t) == 0.0) {
        worst = std::max(worst, problem.objective(projected, t));
      }
    }
  }
  return worst;
}

BestKnownEntry run_oracle(const DynamicProblem& problem, std::size_t t,
                          const OracleSettings& settings, Rng& rng) {
  DEParams params;
  params.pop_size = settings.pop_size;
  params.cr = settings.cr;
  params.f_min = settings.f_min;
  params.f_max = settings.f_max;
  params.bounds = problem.bounds();

  std::vector<std::pair<double, std::vector<double>>> results;
  for (std::size_t r = 0; r < settings.restarts; ++r) {
    CountingEvaluator eval(problem, t, settings.evaluations);
    auto pop = initialize_population(params, problem.dimension(), eval, rng);
    while (!eval.exhausted()) de_generation(pop, params, eval, rng);
    const auto best = rank_members(pop).front();
    auto x = polish(problem, t, pop.members[best].position,
                    settings.polish_iterations);
    const double fx = problem.objective(x, t);
    if (problem.violation(x, t) == 0.0) results.emplace_back(fx, std::move(x));
  }
  if (results.empty()) {
    throw std::runtime_error("oracle found no feasible point at period " +
                             std::to_string(t));
  }
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  BestKnownEntry e;
  e.period = t;
  e.f_star = results.front().first;
  e.x_star = results.front().second;
  e.provenance = Provenance::Oracle;
  const double spread = results.back().first - results.front().first;
  e.low_confidence = results.size() < settings.restarts ||
                     spread > settings.agreement * std::max(1.0, std::abs(e.f_star));
  return e;
}

}  // namespace

BestKnownEntry best_known(const DynamicProblem& problem, std::size_t t,
                          const OracleSettings& settings, std::uint64_t seed) {
  if (t >= problem.periods()) throw std::out_of_range("period out of range");
  Rng rng(mix_seed(seed, t));
  const auto& fn = problem.function();
  const auto& schedule = problem.schedule();

  BestKnownEntry e;
  e.period = t;
  if (!problem.constrained()) {
    e.x_star.assign(schedule.offset(t).begin(), schedule.offset(t).end());
    e.f_star = problem.objective(e.x_star, t);
  } else {
    auto minimizer = fn.canonical_minimizer();
    if (problem.violation(minimizer, t) == 0.0) {
      e.x_star = std::move(minimizer);
      e.f_star = 0.0;
    } else if (fn.kind() == FunctionKind::Sphere) {
      FeasibleSet{problem, t}.project(minimizer, e.x_star);
      e.f_star = problem.objective(e.x_star, t);
    } else {
      e = run_oracle(problem, t, settings, rng);
    }
  }
  e.worst_feasible = sample_worst_feasible(problem, t, settings.worst_samples, rng);
  e.worst_feasible = std::max(e.worst_feasible, e.f_star);
  return e;
}

BestKnownTable build_best_known(const DynamicProblem& problem,
                                const OracleSettings& settings,
                                std::uint64_t seed) {
  std::vector<BestKnownEntry> entries;
  std::map<double, BestKnownEntry> by_bound;
  const bool reuse = problem.constrained();
  for (std::size_t t = 0; t < problem.periods(); ++t) {
    if (reuse) {
      const double b = problem.schedule().constraint_bound(t);
      if (auto it = by_bound.find(b); it != by_bound.end()) {
        auto e = it->second;
        e.period = t;
        entries.push_back(std::move(e));
        continue;
      }
      auto e = best_known(problem, t, settings, seed);
      by_bound.emplace(b, e);
      entries.push_back(std::move(e));
    } else {
      entries.push_back(best_known(problem, t, settings, seed));
    }
  }
  return BestKnownTable(std::move(entries));
}

BestKnownTable load_or_build_best_known(const DynamicProblem& problem,
                                        const OracleSettings& settings,
                                        std::uint64_t seed,
                                        const std::filesystem::path& cache) {
  if (std::filesystem::exists(cache)) {
    auto table = BestKnownTable::read_csv(cache);
    if (table.size() == problem.periods()) return table;
  }
  auto table = build_best_known(problem, settings, seed);
  auto tmp = cache;
  tmp += ".tmp";
  table.write_csv(tmp);
  std::filesystem::rename(tmp, cache);
  return table;
}

}  // namespace dyno
