#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dyno {

/// One row of the per-generation log. f_best is the best feasible objective
/// evaluated in the current period so far; it is meaningless when
/// `feasible` is false.
struct GenerationRecord {
  std::size_t period = 0;
  std::size_t generation = 0;  // 1-based within the period
  std::size_t evals_used = 0;  // evaluation units charged in this period
  double f_best = 0.0;
  bool feasible = false;
  double ea_time = 0.0;        // cumulative run accounts, seconds
  double nn_time = 0.0;
};

struct RunLog {
  std::vector<GenerationRecord> generations;
  std::vector<nlohmann::json> events;  // per-period side channel
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kLogHeader = "t,G,evals_used,f_best,feasible,ea_time,nn_time";

void write_log_row(std::ostream& os, const GenerationRecord& r);
std::vector<GenerationRecord> read_log_csv(const std::filesystem::path& path);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Throws std::runtime_error when generations within a period are not
/// numbered 1, 2, ... or a period's feasible f_best increases.
void validate_log(const std::vector<GenerationRecord>& rows);

}  // namespace dyno
