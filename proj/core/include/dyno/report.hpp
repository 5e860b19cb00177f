#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dyno {

struct SummaryRow {
  std::string function;
  std::string experiment;
  double tau = 0.0;
  std::string method;
  std::size_t k = 0;
  std::size_t n_p = 0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  double mof = 0.0;
  double arr = 0.0;
  double sr = 0.0;
  double nn_time_fraction = 0.0;

  double metric(const std::string& name) const;
};

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);
std::vector<SummaryRow> parse_summary_csv(std::istream& in);

/// Summary CSV recomputed from every run directory below `runs_root`.
std::string metrics_csv(const std::filesystem::path& runs_root);

struct StatsTables {
  std::string kruskal_csv;
  std::string pairwise_csv;
  std::string mof_norm_csv;
  std::string nn_time_csv;
};

/// Per (function, experiment, tau) cell: Kruskal-Wallis across method
/// variants, Bonferroni-adjusted Dunn matrix, MOF_norm (per tau and averaged
/// over taus, labelled "all") and NN-time mean/std.
StatsTables compute_stats(const std::vector<SummaryRow>& rows,
                          const std::string& metric = "mof",
                          double alpha = 0.05);

/// Writes the file bundle consumed by the plotting tool: summary.csv,
/// kruskal.csv, pairwise.csv, mof_norm.csv, nn_time.csv, traces.csv,
/// trajectories.csv and manifest.json.
void export_bundle(const std::filesystem::path& in, const std::filesystem::path& out);

}  // namespace dyno
