#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dyno {

enum class FunctionKind { Sphere, Rosenbrock, Rastrigin };
enum class Experiment { Exp1, Exp2, Exp3, Exp4 };

std::string_view to_string(FunctionKind kind);
std::string_view to_string(Experiment exp);
FunctionKind parse_function(std::string_view name);
Experiment parse_experiment(std::string_view name);

/// exp1/exp2 move a linear constraint bound; exp3/exp4 move the optimum.
inline bool is_constrained(Experiment exp) {
  return exp == Experiment::Exp1 || exp == Experiment::Exp2;
}

struct Bounds {
  double lower = -5.0;
  double upper = 5.0;

  double width() const { return upper - lower; }
  double clamp(double v) const;
  bool contains(std::span<const double> x) const;
};

class BenchmarkFunction {
 public:
  BenchmarkFunction(FunctionKind kind, std::size_t dimension);

  FunctionKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }

  /// Static (unshifted) function value.
  double operator()(std::span<const double> x) const;

  /// Point where the static function attains its global minimum of 0.
  std::vector<double> canonical_minimizer() const;

 private:
  FunctionKind kind_;
  std::size_t dimension_;
};

struct LinearConstraint {
  std::vector<double> coefficients;

  double lhs(std::span<const double> x) const;
};

/// Deterministic description of how the environment evolves over T periods.
struct EnvironmentSchedule {
  Experiment experiment = Experiment::Exp1;
  std::size_t periods = 100;
  std::size_t dimension = 30;
  Bounds bounds;
  std::uint64_t seed = 0;
  LinearConstraint constraint;           // exp1/exp2 only
  std::vector<double> bound_per_period;  // b_t, exp1/exp2 only
  std::vector<std::vector<double>> offset_per_period;  // o_t, exp3/exp4 only

  std::span<const double> offset(std::size_t t) const;
  double constraint_bound(std::size_t t) const;

  nlohmann::json to_json() const;
  static EnvironmentSchedule from_json(const nlohmann::json& j);
};

EnvironmentSchedule generate_schedule(Experiment exp, std::size_t periods,
                                      std::size_t dimension, std::uint64_t seed,
                                      Bounds bounds = {});

/// f(x, t). For exp3/exp4 the canonical minimizer is moved to o_t.
double evaluate_objective(std::span<const double> x, std::size_t t,
                          const EnvironmentSchedule& schedule,
                          const BenchmarkFunction& fn);

/// max(0, a.x - b_t) for the constrained experiments, 0 otherwise.
double constraint_violation(std::span<const double> x, std::size_t t,
                            const EnvironmentSchedule& schedule);

/// Objective function, schedule and constraint bundled for one cell.
class DynamicProblem {
 public:
  DynamicProblem(EnvironmentSchedule schedule, FunctionKind kind);

  const EnvironmentSchedule& schedule() const { return schedule_; }
  const BenchmarkFunction& function() const { return fn_; }
  std::size_t dimension() const { return fn_.dimension(); }
  std::size_t periods() const { return schedule_.periods; }
  const Bounds& bounds() const { return schedule_.bounds; }
  bool constrained() const { return is_constrained(schedule_.experiment); }

  double objective(std::span<const double> x, std::size_t t) const {
    return evaluate_objective(x, t, schedule_, fn_);
  }
  double violation(std::span<const double> x, std::size_t t) const {
    return constraint_violation(x, t, schedule_);
  }

 private:
  EnvironmentSchedule schedule_;
  BenchmarkFunction fn_;
};

/// Euclidean projection of y onto {x in [L,U]^d : a.x <= b}. Returns false
/// when the set is empty.
bool project_box_halfspace(std::span<const double> y,
                           std::span<const double> a, double b,
                           const Bounds& bounds, std::vector<double>& out);

}  // namespace dyno
