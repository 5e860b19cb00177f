// Acceptance suite. One line per criterion; exit status is the number of
// failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dyno/de.hpp"
#include "dyno/harness.hpp"
#include "dyno/metrics.hpp"
#include "dyno/mlp.hpp"
#include "dyno/predictor.hpp"
#include "dyno/stats.hpp"
#include "oracles.hpp"

namespace {

using namespace dyno;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunConfig exp2_sphere(ReactionMode method, double tau, std::size_t run_index) {
  RunConfig c;
  c.function = FunctionKind::Sphere;
  c.experiment = Experiment::Exp2;
  c.method = method;
  c.tau = tau;
  c.run_index = run_index;
  return c;
}

// Sphere tables are analytic, so one table per schedule is cheap; the cache
// only avoids rebuilding the worst-feasible samples.
const BestKnownTable& table_for(const RunConfig& c) {
  static std::map<std::string, BestKnownTable> cache;
  const auto key = best_known_cache_name(c);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, best_known_for(c, std::nullopt)).first;
  return it->second;
}

std::vector<RunResult> runs(ReactionMode method, double tau, std::size_t n) {
  std::vector<RunResult> out;
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = exp2_sphere(method, tau, r);
    out.push_back(execute_run(c, table_for(c)));
  }
  return out;
}

std::vector<double> column(const std::vector<RunResult>& rs, double MetricsSummary::*m) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.summary.*m);
  return v;
}

// Runs shared by the overhead and frequency criteria.
const std::map<double, std::vector<RunResult>>& nnw_by_tau() {
  static const auto data = [] {
    std::map<double, std::vector<RunResult>> m;
    for (double tau : {0.5, 1.0, 4.0}) m[tau] = runs(ReactionMode::NNW, tau, 10);
    return m;
  }();
  return data;
}

Outcome metric_oracles() {
  double worst = 0.0;
  double worst_hand = 0.0;
  std::size_t logs = 0;
  for (const auto& log : oracle::synthetic_logs()) {
    ++logs;
    const auto ref = oracle::brute_force(log.rows, log.table);
    worst = std::max({worst, std::abs(mof(log.rows, log.table) - ref.mof),
                      std::abs(arr(log.rows, log.table) - ref.arr),
                      std::abs(success_rate(log.rows, log.table) - ref.sr)});
    if (!std::isnan(log.mof)) {
      worst_hand = std::max({worst_hand, std::abs(ref.mof - log.mof),
                             std::abs(ref.arr - log.arr), std::abs(ref.sr - log.sr)});
    }
  }
  return {logs == 5 && worst <= 1e-12 && worst_hand <= 1e-12,
          fmt("%zu logs, max |lib - brute| = %.3g, max |brute - hand| = %.3g", logs,
              worst, worst_hand)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    auto [w, s] = oracle::random_case(30, 5, rng);
    MLPWeights grad(30, 5);
    sample_loss(w, s, &grad);
    worst = std::max(worst, oracle::max_relative_error(grad.flatten(),
                                                       oracle::numeric_gradient(w, s, 1e-5)));
  }
  return {worst < 1e-4, fmt("20 draws, d=30, max relative error %.3g", worst)};
}

// Static Sphere with a hard evaluation cap.
class StaticSphere final : public Evaluator {
 public:
  explicit StaticSphere(std::size_t cap) : cap_(cap) {}
  Fitness evaluate(std::span<const double> x) override {
    ++used_;
    double s = 0.0;
    for (double v : x) s += v * v;
    best_ = std::min(best_, s);
    return {s, 0.0};
  }
  bool exhausted() const override { return used_ >= cap_; }
  std::size_t period() const override { return 0; }
  double best() const { return best_; }

 private:
  std::size_t cap_;
  std::size_t used_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

Outcome de_sanity() {
  DEParams params;
  std::size_t hits = 0;
  std::vector<double> bests;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    StaticSphere eval(20000);
    Rng rng(seed);
    auto pop = initialize_population(params, 30, eval, rng);
    while (!eval.exhausted()) de_generation(pop, params, eval, rng);
    bests.push_back(eval.best());
    if (eval.best() <= 1e-2) ++hits;
  }
  return {hits >= 28, fmt("%zu/30 seeds <= 1e-2, median best %.3g, worst %.3g", hits,
                          median(bests), *std::max_element(bests.begin(), bests.end()))};
}

Outcome sample_assembly() {
  SampleBuffer buf(3, 5, std::nullopt);
  for (std::size_t t = 0; t < 6; ++t) {
    std::vector<std::vector<double>> ps;
    for (std::size_t i = 0; i < 3; ++i) {
      ps.emplace_back(4, 0.1 * static_cast<double>(t) + 0.01 * static_cast<double>(i));
    }
    buf.push(t, ps);
  }
  Rng rng(1);
  const auto counted = count_sequences(buf);
  const auto assembled = assemble_training_set(buf, Bounds{}, 100000, rng).size();

  auto c = exp2_sphere(ReactionMode::NNW, 1.0, 0);
  c.experiment = Experiment::Exp3;
  c.periods = 30;
  c.predictor.k = 1;
  c.predictor.min_batch = 20;
  c.predictor.window = std::nullopt;
  const auto r = execute_run(c, best_known_for(c, std::nullopt));
  std::size_t first = 0;
  for (const auto& ev : r.log.events) {
    if (ev.value("prediction_made", false)) {
      first = ev.at("t").get<std::size_t>() + 1;
      break;
    }
  }
  return {counted == 243 && assembled == 243 && first == 26,
          fmt("k=3 n_t=5: %zu counted, %zu assembled; k=1: first prediction at period %zu",
              counted, assembled, first)};
}

Outcome budget_calibration() {
  const auto c = exp2_sphere(ReactionMode::NoNN, 1.0, 0);
  const auto r = execute_run(c, table_for(c));
  std::map<std::size_t, std::size_t> per_period;
  for (const auto& g : r.log.generations) per_period[g.period] = g.evals_used;
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (const auto& [t, n] : per_period) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return {per_period.size() == c.periods && lo >= 1975 && hi <= 2025,
          fmt("%zu periods, evaluations per period in [%zu, %zu]", per_period.size(), lo, hi)};
}

Outcome nn_overhead() {
  const auto& data = nnw_by_tau();
  const double f05 = median(column(data.at(0.5), &MetricsSummary::nn_time_fraction));
  const double f1 = median(column(data.at(1.0), &MetricsSummary::nn_time_fraction));
  const double f4 = median(column(data.at(4.0), &MetricsSummary::nn_time_fraction));
  const bool pass = f05 > f1 && f1 > f4 && f05 >= 0.10 && f05 <= 0.35 && f1 >= 0.05 &&
                    f1 <= 0.20 && f4 >= 0.01 && f4 <= 0.08;
  return {pass, fmt("median nn_time_fraction tau=0.5/1/4: %.4f / %.4f / %.4f", f05, f1, f4)};
}

Outcome frequency_trend() {
  const auto& data = nnw_by_tau();
  const double m05 = median(column(data.at(0.5), &MetricsSummary::mof));
  const double m1 = median(column(data.at(1.0), &MetricsSummary::mof));
  const double m4 = median(column(data.at(4.0), &MetricsSummary::mof));
  return {m4 < m1 && m1 < m05,
          fmt("10 runs, median MOF tau=0.5/1/4: %.4g / %.4g / %.4g", m05, m1, m4)};
}

Outcome prediction_benefit() {
  std::vector<std::vector<double>> groups;
  for (auto m : {ReactionMode::NoNN, ReactionMode::NNW, ReactionMode::NNR}) {
    groups.push_back(column(runs(m, 1.0, 20), &MetricsSummary::mof));
  }
  const double nonn = median(groups[0]);
  const double nnw = median(groups[1]);
  const double nnr = median(groups[2]);
  const auto kw = kruskal_wallis(groups);
  return {nnw < nonn && kw.p < 0.05,
          fmt("20 runs, median MOF noNN/NNW/NNR: %.4g / %.4g / %.4g; H=%.4g p=%.3g", nonn,
              nnw, nnr, kw.h, kw.p)};
}

Outcome statistics_oracle() {
  const auto worked =
      kruskal_wallis(std::vector<std::vector<double>>{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const auto textbook = kruskal_wallis(oracle::textbook_groups());
  const auto dunn = bonferroni_pairwise(oracle::textbook_groups());
  double dunn_err = 0.0;
  for (std::size_t i = 0; i < dunn.size(); ++i) {
    for (std::size_t j = 0; j < dunn.size(); ++j) {
      dunn_err = std::max(dunn_err, std::abs(dunn[i][j] - oracle::kTextbookDunn[i][j]));
    }
  }
  const double h_err = std::abs(textbook.h - oracle::kTextbookH);
  const double p_err = std::abs(textbook.p - oracle::kTextbookP);
  const bool pass = std::abs(worked.h - 7.2) <= 1e-12 && std::abs(worked.p - 0.0273) <= 1e-3 &&
                    h_err <= 1e-6 && p_err <= 1e-6 && dunn_err <= 1e-6;
  return {pass, fmt("worked H=%.6g p=%.6g; textbook |dH|=%.2g |dp|=%.2g |dDunn|=%.2g", worked.h,
                    worked.p, h_err, p_err, dunn_err)};
}

Outcome determinism() {
  std::vector<RunConfig> configs;
  auto a = exp2_sphere(ReactionMode::NNW, 1.0, 3);
  a.experiment = Experiment::Exp3;
  a.periods = 40;
  configs.push_back(a);
  auto b = exp2_sphere(ReactionMode::NNR, 0.5, 7);
  b.periods = 40;
  configs.push_back(b);
  std::size_t identical = 0;
  for (const auto& c : configs) {
    const auto first = execute_run(c, best_known_for(c, std::nullopt));
    const auto second = execute_run(c, best_known_for(c, std::nullopt));
    if (first.log_csv() == second.log_csv() && first.events_jsonl() == second.events_jsonl() &&
        first.summary_json().dump() == second.summary_json().dump()) {
      ++identical;
    }
  }
  return {identical == configs.size(),
          fmt("%zu/%zu configs byte-identical across repeats", identical, configs.size())};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric_oracles", 1, metric_oracles},
      {"nn_gradient_check", 5, gradient_check},
      {"de_sanity", 30, de_sanity},
      {"sample_assembly_counts", 5, sample_assembly},
      {"budget_calibration", 10, budget_calibration},
      {"nn_overhead_trend", 300, nn_overhead},
      {"frequency_trend", 600, frequency_trend},
      {"prediction_benefit", 900, prediction_benefit},
      {"statistics_oracle", 1, statistics_oracle},
      {"determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %-24s %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
