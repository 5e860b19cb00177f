#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "dyno/problems.hpp"

namespace dyno {

enum class Provenance { Analytic, Oracle };

std::string_view to_string(Provenance p);

struct BestKnownEntry {
  std::size_t period = 0;
  double f_star = 0.0;
  std::vector<double> x_star;
  Provenance provenance = Provenance::Analytic;
  /// Largest feasible objective seen while sampling the period. Stands in
  /// for generations that have no feasible solution.
  double worst_feasible = 0.0;
  /// Oracle restarts disagreed; f_star may not be the global optimum.
  bool low_confidence = false;
};

class BestKnownTable {
 public:
  BestKnownTable() = default;
  explicit BestKnownTable(std::vector<BestKnownEntry> entries);

  const std::vector<BestKnownEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Throws std::out_of_range for a period the table does not cover.
  const BestKnownEntry& at(std::size_t t) const;

  /// CSV: t,f_star,x_0..x_{d-1},provenance,worst_feasible,low_confidence
  void write_csv(const std::filesystem::path& path) const;
  static BestKnownTable read_csv(const std::filesystem::path& path);

 private:
  std::vector<BestKnownEntry> entries_;
};

struct OracleSettings {
  std::size_t evaluations = 200000;  // per restart
  std::size_t restarts = 5;
  std::size_t pop_size = 50;
  double cr = 0.9;
  double f_min = 0.5;
  double f_max = 0.9;
  std::size_t polish_iterations = 2000;
  std::size_t worst_samples = 10000;
  /// Restart results further apart than this (relative) are low confidence.
  double agreement = 1e-6;
};

/// Optimum of period t. Analytic when the moved optimum or the projection of
/// the Sphere minimizer is available, restarted DE plus projected-gradient
/// polishing otherwise.
BestKnownEntry best_known(const DynamicProblem& problem, std::size_t t,
                          const OracleSettings& settings, std::uint64_t seed);

/// All periods. Periods sharing an identical environment reuse one oracle
/// result.
BestKnownTable build_best_known(const DynamicProblem& problem,
                                const OracleSettings& settings,
                                std::uint64_t seed);

/// Loads the table from `cache` when present, otherwise builds and writes it.
BestKnownTable load_or_build_best_known(const DynamicProblem& problem,
                                        const OracleSettings& settings,
                                        std::uint64_t seed,
                                        const std::filesystem::path& cache);

/// Gradient of the static benchmark function.
std::vector<double> objective_gradient(const BenchmarkFunction& fn,
                                       std::span<const double> x);

}  // namespace dyno
