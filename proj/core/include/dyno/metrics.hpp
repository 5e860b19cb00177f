#pragma once

#include <span>
#include <vector>

#include "dyno/best_known.hpp"
#include "dyno/run_log.hpp"

namespace dyno {

struct MetricsSummary {
  double mof = 0.0;
  double arr = 0.0;
  double sr = 0.0;
  double nn_time_fraction = 0.0;
};

/// Generation value used by the error measures: f_best when a feasible
/// solution exists, the period's worst feasible value otherwise.
double effective_best(const GenerationRecord& r, const BestKnownTable& table);

/// Modified offline error: mean over all generations of |f* - f_best|.
double mof(std::span<const GenerationRecord> log, const BestKnownTable& table);

/// Absolute recovery rate with absolute values in numerator and denominator.
/// A period whose first generation already sits on f* contributes 1.
double arr(std::span<const GenerationRecord> log, const BestKnownTable& table);

inline constexpr double kSuccessFloor = 1e-4;

/// Fraction of the table's periods in which some feasible generation came
/// within max(epsilon |f*|, floor) of f*.
double success_rate(std::span<const GenerationRecord> log,
                    const BestKnownTable& table, double epsilon = 0.1,
                    double floor = kSuccessFloor);

/// Each value divided by the minimum. Throws on non-positive input.
std::vector<double> mof_norm(std::span<const double> values);

}  // namespace dyno
