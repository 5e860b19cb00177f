#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dyno/best_known.hpp"
#include "dyno/config.hpp"
#include "dyno/metrics.hpp"
#include "dyno/run_log.hpp"

namespace dyno {

/// Everything one run produced, kept in memory.
struct RunResult {
  RunConfig config;
  EnvironmentSchedule schedule;
  BestKnownTable best_known;
  RunLog log;
  MetricsSummary summary;
  std::size_t evaluations = 0;
  std::size_t best_known_violations = 0;
  std::optional<MLPWeights> final_weights;

  std::string log_csv() const;
  std::string events_jsonl() const;
  nlohmann::json summary_json() const;
};

/// Executes one run: evolve until the period budget expires, then at each
/// change detect, record, train/predict (NN methods) and react.
RunResult execute_run(const RunConfig& config, const BestKnownTable& best_known);

/// Schedule the config describes.
EnvironmentSchedule make_schedule(const RunConfig& config);

/// Best-known table for the config's environment. With a cache directory the
/// table is read from / written to a file keyed by (experiment, function, d,
/// schedule seed).
/// Cache file name: function, experiment, d, T, schedule seed and a hash of
/// the bounds and oracle budget.
std::string best_known_cache_name(const RunConfig& config);

BestKnownTable best_known_for(const RunConfig& config,
                              const std::optional<std::filesystem::path>& cache_dir);

struct RunArtifact {
  std::filesystem::path dir;
  RunConfig config;
  MetricsSummary summary;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool reused = false;
  std::string error;  // non-empty when the run failed
};

/// Runs one config and writes config.json, schedule.json, bestknown.csv,
/// log.csv, events.jsonl and summary.json into `dir`.
RunArtifact run_single(const RunConfig& config, const std::filesystem::path& dir,
                       const std::optional<std::filesystem::path>& cache_dir = {});

struct MatrixOptions {
  unsigned parallelism = 1;
  bool reuse_complete = true;
};

/// Runs every cell of the matrix under out/runs/<label>/ and writes
/// out/summary.csv. Failed runs are reported in their artifact; the matrix
/// carries on.
std::vector<RunArtifact> run_matrix(const MatrixConfig& matrix,
                                    const std::filesystem::path& out,
                                    const MatrixOptions& options = {});

/// Recomputes the summary of a persisted run from its files.
nlohmann::json recompute_summary(const std::filesystem::path& run_dir);

/// Run directories (holding summary.json) below `root`, sorted.
std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root);

inline constexpr const char* kSummaryHeader =
    "function,experiment,tau,method,k,n_p,run_index,seed,config_hash,mof,arr,sr,"
    "nn_time_fraction";

std::string summary_csv_row(const nlohmann::json& summary);

/// Output root from DYNO_OUT_DIR, or `fallback`.
std::filesystem::path default_out_dir(const std::filesystem::path& fallback);

}  // namespace dyno
