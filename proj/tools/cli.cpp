#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyno/harness.hpp"
#include "dyno/report.hpp"

namespace dyno {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string in;
  std::string clock;
  std::string metric = "mof";
  double alpha = 0.05;
  unsigned jobs = 1;
  bool no_reuse = false;
};

fs::path out_root(const Options& o) {
  return o.out.empty() ? default_out_dir("dyno-out") : fs::path(o.out);
}

void apply_overrides(RunConfig& c, const Options& o) {
  if (o.seed) c.base_seed = *o.seed;
  if (!o.clock.empty()) c.clock = parse_clock_mode(o.clock);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const Options& o) {
  auto config = RunConfig::load(o.config);
  apply_overrides(config, o);
  const fs::path root = out_root(o);
  const auto artifact = run_single(config, root / config.label(), root / "bestknown");
  std::cout << artifact.dir.string() << '\n';
  return 0;
}

int cmd_matrix(const Options& o) {
  auto matrix = MatrixConfig::load(o.config);
  apply_overrides(matrix.base, o);
  MatrixOptions options;
  options.parallelism = o.jobs;
  options.reuse_complete = !o.no_reuse;
  const auto artifacts = run_matrix(matrix, out_root(o), options);
  std::size_t failed = 0;
  std::size_t reused = 0;
  for (const auto& a : artifacts) {
    if (!a.error.empty()) {
      ++failed;
      std::cerr << "run failed: " << a.dir.string() << ": " << a.error << '\n';
    }
    if (a.reused) ++reused;
  }
  std::cout << artifacts.size() << " runs, " << reused << " reused, " << failed
            << " failed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_bestknown(const Options& o) {
  auto config = RunConfig::load(o.config);
  apply_overrides(config, o);
  const fs::path dir = out_root(o);
  fs::create_directories(dir);
  const auto table = best_known_for(config, dir);
  std::size_t low = 0;
  for (const auto& e : table.entries()) low += e.low_confidence ? 1 : 0;
  std::cout << (dir / best_known_cache_name(config)).string() << '\n';
  if (low > 0) std::cerr << low << " periods flagged low confidence\n";
  return 0;
}

int cmd_metrics(const Options& o) {
  const auto csv = metrics_csv(o.in);
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_file(o.out, csv);
  }
  return 0;
}

int cmd_stats(const Options& o) {
  fs::path in = o.in;
  if (fs::is_directory(in)) in /= "summary.csv";
  const auto tables = compute_stats(read_summary_csv(in), o.metric, o.alpha);
  const fs::path dir = out_root(o);
  write_file(dir / "kruskal.csv", tables.kruskal_csv);
  write_file(dir / "pairwise.csv", tables.pairwise_csv);
  write_file(dir / "mof_norm.csv", tables.mof_norm_csv);
  write_file(dir / "nn_time.csv", tables.nn_time_csv);
  return 0;
}

int cmd_export(const Options& o) {
  export_bundle(o.in, out_root(o));
  return 0;
}

}  // namespace

int cli_entry(int argc, const char* const* argv) {
  CLI::App app{"Benchmark harness for NN-assisted differential evolution on "
               "dynamic constrained problems"};
  app.name("dyno");
  app.require_subcommand(1);

  Options o;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file")->required()
        ->check(CLI::ExistingFile);
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Override base_seed");
    sub->add_option("--clock", o.clock, "Override the clock mode")
        ->check(CLI::IsMember({"real", "virtual"}));
  };

  auto* run = app.add_subcommand("run", "Execute one run configuration");
  add_config(run);
  add_common(run);
  run->add_option("--out", o.out, "Output root (default $DYNO_OUT_DIR or ./dyno-out)");

  auto* matrix = app.add_subcommand("matrix", "Execute a run matrix");
  add_config(matrix);
  add_common(matrix);
  matrix->add_option("--out", o.out, "Output root (default $DYNO_OUT_DIR or ./dyno-out)");
  matrix->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  matrix->add_flag("--no-reuse", o.no_reuse, "Rerun cells that already completed");

  auto* bestknown = app.add_subcommand("bestknown", "Build the best-known table cache");
  add_config(bestknown);
  add_common(bestknown);
  bestknown->add_option("--out", o.out, "Cache directory");

  auto* metrics = app.add_subcommand("metrics", "Recompute summaries from run logs");
  metrics->add_option("--in", o.in, "Directory holding run artifacts")->required()
      ->check(CLI::ExistingDirectory);
  metrics->add_option("--out", o.out, "Summary CSV (default stdout)");

  auto* stats = app.add_subcommand("stats", "Kruskal-Wallis and pairwise tables");
  stats->add_option("--in", o.in, "summary.csv or a directory holding it")->required()
      ->check(CLI::ExistingPath);
  stats->add_option("--out", o.out, "Output directory");
  stats->add_option("--metric", o.metric, "Metric to compare")
      ->check(CLI::IsMember({"mof", "arr", "sr", "nn_time_fraction"}));
  stats->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

  auto* exp = app.add_subcommand("export", "Bundle artifacts for plotting");
  exp->add_option("--in", o.in, "Directory holding run artifacts")->required()
      ->check(CLI::ExistingDirectory);
  exp->add_option("--out", o.out, "Export directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*matrix) return cmd_matrix(o);
    if (*bestknown) return cmd_bestknown(o);
    if (*metrics) return cmd_metrics(o);
    if (*stats) return cmd_stats(o);
    if (*exp) return cmd_export(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dyno
