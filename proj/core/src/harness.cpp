#include "dyno/harness.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dyno/clock.hpp"
#include "dyno/de.hpp"
#include "dyno/predictor.hpp"

namespace dyno {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Charges the shared time budget and tracks the best feasible objective seen
// in the current period.
class BudgetedEvaluator final : public Evaluator {
 public:
  BudgetedEvaluator(const DynamicProblem& problem, TimeBudget& budget)
      : problem_(problem), budget_(budget) {}

  Fitness evaluate(std::span<const double> x) override {
    Fitness fit;
    fit.objective = problem_.objective(x, t_);
    budget_.charge_evaluations(1);
    if (problem_.constrained()) {
      fit.violation = problem_.violation(x, t_);
      budget_.charge_evaluations(1);
    }
    if (fit.violation == 0.0 && (!feasible_ || fit.objective < best_)) {
      best_ = fit.objective;
      feasible_ = true;
    }
    return fit;
  }

  bool exhausted() const override { return budget_.period_expired(); }
  std::size_t period() const override { return t_; }

  void start_period(std::size_t t) {
    t_ = t;
    feasible_ = false;
    best_ = std::numeric_limits<double>::infinity();
  }
  bool has_feasible() const { return feasible_; }
  double best() const { return feasible_ ? best_ : 0.0; }

 private:
  const DynamicProblem& problem_;
  TimeBudget& budget_;
  std::size_t t_ = 0;
  bool feasible_ = false;
  double best_ = std::numeric_limits<double>::infinity();
};

json positions_json(const std::vector<std::vector<double>>& ps) {
  json arr = json::array();
  for (const auto& p : ps) arr.push_back(p);
  return arr;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

}  // namespace

EnvironmentSchedule make_schedule(const RunConfig& config) {
  return generate_schedule(config.experiment, config.periods, config.dimension,
                           config.schedule_seed(), config.de.bounds);
}

std::string best_known_cache_name(const RunConfig& config) {
  const json key = {{"lower", config.de.bounds.lower},
                    {"upper", config.de.bounds.upper},
                    {"oracle_evaluations", config.oracle_evaluations},
                    {"oracle_restarts", config.oracle_restarts}};
  char settings[17];
  std::snprintf(settings, sizeof settings, "%016llx",
                static_cast<unsigned long long>(fnv1a(key.dump())));
  return "bestknown-" + std::string(to_string(config.function)) + "-" +
         std::string(to_string(config.experiment)) + "-d" +
         std::to_string(config.dimension) + "-T" + std::to_string(config.periods) +
         "-s" + std::to_string(config.schedule_seed()) + "-" +
         std::string(settings, 8) + ".csv";
}

BestKnownTable best_known_for(const RunConfig& config,
                              const std::optional<fs::path>& cache_dir) {
  const DynamicProblem problem(make_schedule(config), config.function);
  const auto seed = config.schedule_seed();
  if (!cache_dir) return build_best_known(problem, config.oracle(), seed);
  return load_or_build_best_known(problem, config.oracle(), seed,
                                  *cache_dir / best_known_cache_name(config));
}

RunResult execute_run(const RunConfig& config, const BestKnownTable& best_known) {
  config.validate();
  RunResult result;
  result.config = config;
  result.schedule = make_schedule(config);
  result.best_known = best_known;
  if (best_known.size() != config.periods) {
    throw std::invalid_argument("best-known table does not cover every period");
  }

  const DynamicProblem problem(result.schedule, config.function);
  const std::uint64_t seed = config.run_seed();
  Rng rng(seed);
  Rng nn_rng(mix_seed(seed, 0x4e4eULL));

  TimeBudget budget(config.tau, config.clock, config.costs);
  BudgetedEvaluator eval(problem, budget);

  const bool nn_method = config.method != ReactionMode::NoNN;
  std::optional<Predictor> predictor;
  if (nn_method) {
    predictor.emplace(config.predictor, config.dimension, config.de.bounds, nn_rng);
  }

  auto& rows = result.log.generations;
  budget.start_period();
  eval.start_period(0);
  Population pop = initialize_population(config.de, config.dimension, eval, rng);

  for (std::size_t t = 0; t < config.periods; ++t) {
    if (t > 0) {
      budget.start_period();
      eval.start_period(t);
      json ev;
      ev["event"] = "change";
      ev["t"] = t;

      const bool detected = detect_change(pop, eval);
      ev["detected"] = detected;

      // Archive of the period that just ended, from the cached fitness.
      ev["recorded_period"] = t - 1;
      std::vector<std::vector<double>> predictions;
      if (!nn_method) {
        const auto order = rank_members(pop);
        std::vector<std::vector<double>> kbest;
        for (std::size_t i = 0; i < std::min(config.predictor.k, pop.size()); ++i) {
          kbest.push_back(pop.members[order[i]].position);
        }
        ev["k_best"] = positions_json(kbest);
      } else {
        predictor->record_period(pop, t - 1);
        ev["k_best"] = positions_json(predictor->buffer().entries().back().positions);
        if (detected || config.train_every_period) {
          const auto outcome = budget.measure(
              Account::NN, [&] { return predictor->train_if_ready(nn_rng); });
          budget.charge_training_batches(outcome.result.batches);
          ev["samples"] = outcome.samples;
          ev["trained"] = outcome.trained;
          ev["loss_history"] = outcome.result.loss_history;
          if (outcome.result.aborted) ev["incident"] = "non-finite loss, weights rolled back";
        }
        if (detected && predictor->ready()) {
          predictions = budget.measure(
              Account::NN, [&] { return predictor->predict(config.n_p, nn_rng); });
          if (!predictions.empty()) budget.charge_prediction();
        }
      }
      ev["prediction_made"] = !predictions.empty();

      if (detected) {
        const auto reaction = react(pop, config.method, predictions, eval, rng);
        ev["replaced"] = reaction.replaced;
      } else {
        ev["replaced"] = json::array();
      }
      ev["ea_time"] = budget.ea_time();
      ev["nn_time"] = budget.nn_time();
      result.log.events.push_back(std::move(ev));
    }

    std::size_t generation = 0;
    while (!budget.period_expired()) {
      if (de_generation(pop, config.de, eval, rng) == 0) break;
      GenerationRecord r;
      r.period = t;
      r.generation = ++generation;
      r.evals_used = budget.evaluations_in_period();
      r.feasible = eval.has_feasible();
      r.f_best = eval.best();
      r.ea_time = budget.ea_time();
      r.nn_time = budget.nn_time();
      if (r.feasible && r.f_best < best_known.at(t).f_star - 1e-9) {
        ++result.best_known_violations;
      }
      rows.push_back(r);
    }
  }

  result.evaluations = budget.total_evaluations();
  if (rows.empty()) throw std::runtime_error("run produced no generations");
  result.summary.mof = mof(rows, best_known);
  result.summary.arr = arr(rows, best_known);
  result.summary.sr = success_rate(rows, best_known);
  result.summary.nn_time_fraction = budget.nn_time_fraction();

  json end;
  end["event"] = "run_end";
  end["ea_time"] = budget.ea_time();
  end["nn_time"] = budget.nn_time();
  end["evaluations"] = result.evaluations;
  end["best_known_violations"] = result.best_known_violations;
  result.log.events.push_back(std::move(end));

  if (predictor && config.dump_weights) result.final_weights = predictor->weights();
  return result;
}

std::string RunResult::log_csv() const {
  std::ostringstream os;
  os << kLogHeader << '\n';
  for (const auto& r : log.generations) write_log_row(os, r);
  return os.str();
}

std::string RunResult::events_jsonl() const {
  std::string out;
  for (const auto& e : log.events) {
    out += e.dump();
    out += '\n';
  }
  return out;
}

json RunResult::summary_json() const {
  json j;
  j["config_hash"] = config.config_hash_hex();
  j["seed"] = config.run_seed();
  j["function"] = to_string(config.function);
  j["experiment"] = to_string(config.experiment);
  j["tau"] = config.tau;
  j["method"] = to_string(config.method);
  j["k"] = config.predictor.k;
  j["n_p"] = config.n_p;
  j["run_index"] = config.run_index;
  j["mof"] = summary.mof;
  j["arr"] = summary.arr;
  j["sr"] = summary.sr;
  j["nn_time_fraction"] = summary.nn_time_fraction;
  j["generations"] = log.generations.size();
  j["evaluations"] = evaluations;
  j["best_known_violations"] = best_known_violations;
  return j;
}

RunArtifact run_single(const RunConfig& config, const fs::path& dir,
                       const std::optional<fs::path>& cache_dir) {
  RunArtifact artifact;
  artifact.dir = dir;
  artifact.config = config;
  artifact.config_hash = config.config_hash_hex();
  artifact.seed = config.run_seed();

  const auto table = best_known_for(config, cache_dir);
  const auto result = execute_run(config, table);
  artifact.summary = result.summary;

  fs::create_directories(dir);
  write_text(dir / "config.json", config.to_json().dump(2) + "\n");
  write_text(dir / "schedule.json", result.schedule.to_json().dump() + "\n");
  table.write_csv(dir / "bestknown.csv");
  write_text(dir / "log.csv", result.log_csv());
  write_text(dir / "events.jsonl", result.events_jsonl());
  if (result.final_weights) {
    write_text(dir / "weights.json", result.final_weights->to_json().dump() + "\n");
  }
  // Written last: its presence marks a complete artifact.
  write_text(dir / "summary.json", result.summary_json().dump(2) + "\n");
  return artifact;
}

namespace {

bool complete_artifact(const fs::path& dir, const RunConfig& config) {
  if (!fs::exists(dir / "summary.json") || !fs::exists(dir / "config.json")) {
    return false;
  }
  try {
    return read_json(dir / "config.json") == config.to_json();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::vector<RunArtifact> run_matrix(const MatrixConfig& matrix, const fs::path& out,
                                    const MatrixOptions& options) {
  const auto configs = matrix.expand();
  const fs::path cache_dir = out / "bestknown";
  fs::create_directories(out / "runs");

  // Best-known tables are shared by every run of a cell; build them once up
  // front so workers only read the cache.
  std::map<std::string, RunConfig> cells;
  for (const auto& c : configs) {
    const auto key = std::string(to_string(c.function)) + "/" +
                     std::string(to_string(c.experiment)) + "/" +
                     std::to_string(c.schedule_seed());
    cells.emplace(key, c);
  }
  for (const auto& [_, c] : cells) best_known_for(c, cache_dir);

  std::vector<RunArtifact> artifacts(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto& c = configs[i];
      const auto dir = out / "runs" / c.label();
      auto& a = artifacts[i];
      a.dir = dir;
      a.config = c;
      a.config_hash = c.config_hash_hex();
      a.seed = c.run_seed();
      try {
        if (options.reuse_complete && complete_artifact(dir, c)) {
          const auto s = read_json(dir / "summary.json");
          a.summary = {s.at("mof").get<double>(), s.at("arr").get<double>(),
                       s.at("sr").get<double>(), s.at("nn_time_fraction").get<double>()};
          a.reused = true;
        } else {
          a = run_single(c, dir, cache_dir);
        }
      } catch (const std::exception& e) {
        a.error = e.what();
      }
    }
  };

  const unsigned threads = std::max(1u, options.parallelism);
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::ostringstream csv;
  csv << kSummaryHeader << '\n';
  for (const auto& a : artifacts) {
    if (a.error.empty()) csv << summary_csv_row(read_json(a.dir / "summary.json")) << '\n';
  }
  write_text(out / "summary.csv", csv.str());
  return artifacts;
}

json recompute_summary(const fs::path& run_dir) {
  const auto config = RunConfig::from_json(read_json(run_dir / "config.json"));
  const auto table = BestKnownTable::read_csv(run_dir / "bestknown.csv");
  const auto rows = read_log_csv(run_dir / "log.csv");
  validate_log(rows);
  const auto events = read_jsonl(run_dir / "events.jsonl");
  if (events.empty() || events.back().value("event", "") != "run_end") {
    throw std::runtime_error("events.jsonl lacks a run_end record in " + run_dir.string());
  }
  const auto& end = events.back();

  RunResult r;
  r.config = config;
  r.log.generations = rows;
  r.summary.mof = mof(rows, table);
  r.summary.arr = arr(rows, table);
  r.summary.sr = success_rate(rows, table);
  const double ea = end.at("ea_time").get<double>();
  const double nn = end.at("nn_time").get<double>();
  r.summary.nn_time_fraction = nn / (ea + nn);
  r.evaluations = end.at("evaluations").get<std::size_t>();
  r.best_known_violations = end.at("best_known_violations").get<std::size_t>();
  return r.summary_json();
}

std::vector<fs::path> find_run_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (!fs::exists(root)) throw std::runtime_error("no such directory: " + root.string());
  if (fs::exists(root / "summary.json") && fs::exists(root / "log.csv")) {
    dirs.push_back(root);
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "summary.json") &&
        fs::exists(entry.path() / "log.csv")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::string summary_csv_row(const json& s) {
  std::ostringstream os;
  os << s.at("function").get<std::string>() << ',' << s.at("experiment").get<std::string>()
     << ',' << format_tau(s.at("tau").get<double>()) << ','
     << s.at("method").get<std::string>() << ',' << s.at("k").get<std::size_t>() << ','
     << s.at("n_p").get<std::size_t>() << ',' << s.at("run_index").get<std::size_t>()
     << ',' << s.at("seed").get<std::uint64_t>() << ','
     << s.at("config_hash").get<std::string>() << ','
     << format_double(s.at("mof").get<double>()) << ','
     << format_double(s.at("arr").get<double>()) << ','
     << format_double(s.at("sr").get<double>()) << ','
     << format_double(s.at("nn_time_fraction").get<double>());
  return os.str();
}

fs::path default_out_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("DYNO_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return fallback;
}

}  // namespace dyno
