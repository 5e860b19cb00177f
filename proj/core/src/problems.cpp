#include "dyno/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dyno/rng.hpp"

namespace dyno {

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Sphere: return "sphere";
    case FunctionKind::Rosenbrock: return "rosenbrock";
    case FunctionKind::Rastrigin: return "rastrigin";
  }
  return "?";
}

std::string_view to_string(Experiment exp) {
  switch (exp) {
    case Experiment::Exp1: return "exp1";
    case Experiment::Exp2: return "exp2";
    case Experiment::Exp3: return "exp3";
    case Experiment::Exp4: return "exp4";
  }
  return "?";
}

FunctionKind parse_function(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "sphere") return FunctionKind::Sphere;
  if (lower == "rosenbrock") return FunctionKind::Rosenbrock;
  if (lower == "rastrigin") return FunctionKind::Rastrigin;
  throw std::invalid_argument("unknown function: " + std::string(name));
}

Experiment parse_experiment(std::string_view name) {
  if (name == "exp1") return Experiment::Exp1;
  if (name == "exp2") return Experiment::Exp2;
  if (name == "exp3") return Experiment::Exp3;
  if (name == "exp4") return Experiment::Exp4;
  throw std::invalid_argument("unknown experiment: " + std::string(name));
}

double Bounds::clamp(double v) const { return std::clamp(v, lower, upper); }

bool Bounds::contains(std::span<const double> x) const {
  return std::all_of(x.begin(), x.end(),
                     [&](double v) { return v >= lower && v <= upper; });
}

BenchmarkFunction::BenchmarkFunction(FunctionKind kind, std::size_t dimension)
    : kind_(kind), dimension_(dimension) {
  if (dimension < 2) {
    throw std::invalid_argument("benchmark dimension must be >= 2");
  }
}

double BenchmarkFunction::operator()(std::span<const double> x) const {
  if (x.size() != dimension_) {
    throw std::invalid_argument("dimension mismatch in objective");
  }
  double sum = 0.0;
  switch (kind_) {
    case FunctionKind::Sphere:
      for (double v : x) sum += v * v;
      break;
    case FunctionKind::Rosenbrock:
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        sum += 100.0 * a * a + b * b;
      }
      break;
    case FunctionKind::Rastrigin:
      sum = 10.0 * static_cast<double>(x.size());
      for (double v : x) {
        sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
      }
      break;
  }
  return sum;
}

std::vector<double> BenchmarkFunction::canonical_minimizer() const {
  const double v = kind_ == FunctionKind::Rosenbrock ? 1.0 : 0.0;
  return std::vector<double>(dimension_, v);
}

double LinearConstraint::lhs(std::span<const double> x) const {
  if (x.size() != coefficients.size()) {
    throw std::invalid_argument("dimension mismatch in constraint");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += coefficients[i] * x[i];
  return s;
}

std::span<const double> EnvironmentSchedule::offset(std::size_t t) const {
  return offset_per_period.at(t);
}

double EnvironmentSchedule::constraint_bound(std::size_t t) const {
  return bound_per_period.at(t);
}

nlohmann::json EnvironmentSchedule::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  j["periods"] = periods;
  j["dimension"] = dimension;
  j["bounds"] = {bounds.lower, bounds.upper};
  j["seed"] = seed;
  if (is_constrained(experiment)) {
    j["constraint"] = constraint.coefficients;
    j["b"] = bound_per_period;
  } else {
    j["offset"] = offset_per_period;
  }
  return j;
}

EnvironmentSchedule EnvironmentSchedule::from_json(const nlohmann::json& j) {
  EnvironmentSchedule s;
  s.experiment = parse_experiment(j.at("experiment").get<std::string>());
  s.periods = j.at("periods").get<std::size_t>();
  s.dimension = j.at("dimension").get<std::size_t>();
  s.bounds = {j.at("bounds").at(0).get<double>(),
              j.at("bounds").at(1).get<double>()};
  s.seed = j.at("seed").get<std::uint64_t>();
  if (is_constrained(s.experiment)) {
    s.constraint.coefficients = j.at("constraint").get<std::vector<double>>();
    s.bound_per_period = j.at("b").get<std::vector<double>>();
  } else {
    s.offset_per_period =
        j.at("offset").get<std::vector<std::vector<double>>>();
  }
  return s;
}

EnvironmentSchedule generate_schedule(Experiment exp, std::size_t periods,
                                      std::size_t dimension, std::uint64_t seed,
                                      Bounds bounds) {
  if (periods < 1) throw std::invalid_argument("schedule needs T >= 1");
  if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");

  EnvironmentSchedule s;
  s.experiment = exp;
  s.periods = periods;
  s.dimension = dimension;
  s.bounds = bounds;
  s.seed = seed;

  Rng rng(seed);
  const double d = static_cast<double>(dimension);
  switch (exp) {
    case Experiment::Exp1:
      s.constraint.coefficients.assign(dimension, 1.0);
      for (std::size_t t = 0; t < periods; ++t) {
        s.bound_per_period.push_back(uniform(rng, -0.5 * d, 0.5 * d));
      }
      break;
    case Experiment::Exp2:
      s.constraint.coefficients.assign(dimension, 1.0);
      for (std::size_t t = 0; t < periods; ++t) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 12.0;
        s.bound_per_period.push_back(d / 4.0 * std::sin(phase));
      }
      break;
    case Experiment::Exp3:
      for (std::size_t t = 0; t < periods; ++t) {
        const double v =
            std::clamp(0.1 * static_cast<double>(t), bounds.lower, bounds.upper);
        s.offset_per_period.emplace_back(dimension, v);
      }
      break;
    case Experiment::Exp4:
      for (std::size_t t = 0; t < periods; ++t) {
        const double amplitude = uniform(rng, 2.0, 5.0);
        double v = amplitude * std::sin(std::numbers::pi * static_cast<double>(t) / 2.0);
        // sin(k*pi) is not exactly zero in floating point
        if (t % 2 == 0) v = 0.0;
        s.offset_per_period.emplace_back(dimension, bounds.clamp(v));
      }
      break;
  }
  return s;
}

double evaluate_objective(std::span<const double> x, std::size_t t,
                          const EnvironmentSchedule& schedule,
                          const BenchmarkFunction& fn) {
  if (x.size() != fn.dimension()) {
    throw std::invalid_argument("dimension mismatch in objective");
  }
  if (t >= schedule.periods) throw std::out_of_range("period out of range");
  if (is_constrained(schedule.experiment)) return fn(x);

  // Move the canonical minimizer onto o_t. For Sphere and Rastrigin this is
  // exactly base(x - o_t).
  const auto offset = schedule.offset(t);
  const double shift = fn.kind() == FunctionKind::Rosenbrock ? 1.0 : 0.0;
  thread_local std::vector<double> shifted;
  shifted.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    shifted[i] = x[i] - offset[i] + shift;
  }
  return fn(shifted);
}

double constraint_violation(std::span<const double> x, std::size_t t,
                            const EnvironmentSchedule& schedule) {
  if (x.size() != schedule.dimension) {
    throw std::invalid_argument("dimension mismatch in constraint");
  }
  if (t >= schedule.periods) throw std::out_of_range("period out of range");
  if (!is_constrained(schedule.experiment)) return 0.0;
  return std::max(0.0, schedule.constraint.lhs(x) - schedule.constraint_bound(t));
}

DynamicProblem::DynamicProblem(EnvironmentSchedule schedule, FunctionKind kind)
    : schedule_(std::move(schedule)), fn_(kind, schedule_.dimension) {}

bool project_box_halfspace(std::span<const double> y,
                           std::span<const double> a, double b,
                           const Bounds& bounds, std::vector<double>& out) {
  const std::size_t d = y.size();
  out.resize(d);
  auto at = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = bounds.clamp(y[i] - lambda * a[i]);
      s += a[i] * out[i];
    }
    return s;
  };

  if (at(0.0) <= b) return true;

  double min_lhs = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    min_lhs += a[i] * (a[i] > 0 ? bounds.lower : bounds.upper);
  }
  if (min_lhs > b) return false;

  double lo = 0.0;
  double hi = 1.0;
  while (at(hi) > b) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) > b ? lo : hi) = mid;
  }

  // The active set is now known; solve for the multiplier exactly on it.
  at(hi);
  double free_ay = 0.0;
  double free_aa = 0.0;
  double clamped = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (out[i] > bounds.lower && out[i] < bounds.upper) {
      free_ay += a[i] * y[i];
      free_aa += a[i] * a[i];
    } else {
      clamped += a[i] * out[i];
    }
  }
  if (free_aa > 0.0) {
    const double lambda = (free_ay + clamped - b) / free_aa;
    for (std::size_t i = 0; i < d; ++i) {
      if (out[i] > bounds.lower && out[i] < bounds.upper) {
        out[i] = bounds.clamp(y[i] - lambda * a[i]);
      }
    }
    // Rounding may leave the exact solve a few ulps outside; the bisection
    // end point is feasible by construction.
    double lhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) lhs += a[i] * out[i];
    if (lhs > b) at(hi);
  }
  return true;
}

}  // namespace dyno
