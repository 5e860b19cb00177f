#include "dyno/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyno {

double effective_best(const GenerationRecord& r, const BestKnownTable& table) {
  return r.feasible ? r.f_best : table.at(r.period).worst_feasible;
}

double mof(std::span<const GenerationRecord> log, const BestKnownTable& table) {
  if (log.empty()) throw std::invalid_argument("MOF of an empty log");
  double sum = 0.0;
  for (const auto& r : log) {
    sum += std::abs(table.at(r.period).f_star - effective_best(r, table));
  }
  return sum / static_cast<double>(log.size());
}

double arr(std::span<const GenerationRecord> log, const BestKnownTable& table) {
  if (log.empty()) throw std::invalid_argument("ARR of an empty log");
  double total = 0.0;
  std::size_t periods = 0;
  for (std::size_t begin = 0; begin < log.size();) {
    std::size_t end = begin;
    while (end < log.size() && log[end].period == log[begin].period) ++end;

    const double f_star = table.at(log[begin].period).f_star;
    const double first = effective_best(log[begin], table);
    const double gap = std::abs(f_star - first);
    double term = 1.0;
    if (gap > 0.0) {
      double recovered = 0.0;
      for (std::size_t j = begin; j < end; ++j) {
        recovered += std::abs(effective_best(log[j], table) - first);
      }
      term = std::clamp(recovered / (static_cast<double>(end - begin) * gap), 0.0, 1.0);
    }
    total += term;
    ++periods;
    begin = end;
  }
  return total / static_cast<double>(periods);
}

double success_rate(std::span<const GenerationRecord> log,
                    const BestKnownTable& table, double epsilon, double floor) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (table.size() == 0) throw std::invalid_argument("empty best-known table");
  std::vector<bool> reached(table.size(), false);
  for (const auto& r : log) {
    if (!r.feasible) continue;
    const double f_star = table.at(r.period).f_star;
    const double tolerance = std::max(epsilon * std::abs(f_star), floor);
    if (std::abs(r.f_best - f_star) <= tolerance) reached[r.period] = true;
  }
  const auto hits = std::count(reached.begin(), reached.end(), true);
  return static_cast<double>(hits) / static_cast<double>(table.size());
}

std::vector<double> mof_norm(std::span<const double> values) {
  if (values.empty()) return {};
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("MOF_norm needs positive values");
  }
  const double lo = *std::min_element(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v == lo ? 1.0 : v / lo);
  return out;
}

}  // namespace dyno
