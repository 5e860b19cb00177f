#include "dyno/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dyno/best_known.hpp"
#include "dyno/config.hpp"
#include "dyno/harness.hpp"
#include "dyno/metrics.hpp"
#include "dyno/pca.hpp"
#include "dyno/run_log.hpp"
#include "dyno/stats.hpp"

namespace dyno {

namespace fs = std::filesystem;
using nlohmann::json;

double SummaryRow::metric(const std::string& name) const {
  if (name == "mof") return mof;
  if (name == "arr") return arr;
  if (name == "sr") return sr;
  if (name == "nn_time_fraction") return nn_time_fraction;
  throw std::invalid_argument("unknown metric: " + name);
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_summary_csv(in);
}

std::vector<SummaryRow> parse_summary_csv(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line != kSummaryHeader) throw std::runtime_error("unexpected summary header");
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 13) throw std::runtime_error("bad summary row: " + line);
    SummaryRow r;
    r.function = f[0];
    r.experiment = f[1];
    r.tau = std::stod(f[2]);
    r.method = f[3];
    r.k = std::stoul(f[4]);
    r.n_p = std::stoul(f[5]);
    r.run_index = std::stoul(f[6]);
    r.seed = std::stoull(f[7]);
    r.config_hash = f[8];
    r.mof = std::stod(f[9]);
    r.arr = std::stod(f[10]);
    r.sr = std::stod(f[11]);
    r.nn_time_fraction = std::stod(f[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string metrics_csv(const fs::path& runs_root) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& dir : find_run_dirs(runs_root)) {
    os << summary_csv_row(recompute_summary(dir)) << '\n';
  }
  return os.str();
}

namespace {

struct Cell {
  std::string function;
  std::string experiment;
  double tau;
  auto operator<=>(const Cell&) const = default;
};

std::string cell_prefix(const Cell& c) {
  return c.function + ',' + c.experiment + ',' + format_tau(c.tau);
}

// Method label; k and n_p are appended only when they vary inside the data.
std::map<Cell, std::map<std::string, std::vector<const SummaryRow*>>> group_rows(
    const std::vector<SummaryRow>& rows) {
  std::set<std::pair<std::size_t, std::size_t>> variants;
  for (const auto& r : rows) variants.emplace(r.k, r.n_p);
  const bool qualify = variants.size() > 1;

  std::map<Cell, std::map<std::string, std::vector<const SummaryRow*>>> cells;
  for (const auto& r : rows) {
    std::string label = r.method;
    if (qualify) label += "-k" + std::to_string(r.k) + "-np" + std::to_string(r.n_p);
    cells[{r.function, r.experiment, r.tau}][label].push_back(&r);
  }
  return cells;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

StatsTables compute_stats(const std::vector<SummaryRow>& rows,
                          const std::string& metric, double alpha) {
  std::ostringstream kw, pw, norm, nn;
  kw << "function,experiment,tau,metric,groups,H,p,reject\n";
  pw << "function,experiment,tau,metric,a,b,p_bonferroni,significant\n";
  norm << "function,experiment,tau,method,mean_mof,mof_norm\n";
  nn << "function,experiment,tau,method,mean,std\n";

  const auto cells = group_rows(rows);
  // (function, experiment) -> method -> MOF_norm values across taus
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>>
      across_tau;

  for (const auto& [cell, groups] : cells) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
    std::vector<double> mean_mofs;
    for (const auto& [label, members] : groups) {
      labels.push_back(label);
      std::vector<double> v, mofs, nns;
      for (const auto* r : members) {
        v.push_back(r->metric(metric));
        mofs.push_back(r->mof);
        nns.push_back(r->nn_time_fraction);
      }
      values.push_back(std::move(v));
      mean_mofs.push_back(mean(mofs));
      nn << cell_prefix(cell) << ',' << label << ',' << format_double(mean(nns)) << ','
         << format_double(stddev(nns)) << '\n';
    }

    if (labels.size() >= 2) {
      const auto res = kruskal_wallis(values);
      kw << cell_prefix(cell) << ',' << metric << ',' << labels.size() << ','
         << format_double(res.h) << ',' << format_double(res.p) << ','
         << (res.p < alpha ? 1 : 0) << '\n';
      const auto adj = bonferroni_pairwise(values);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
          pw << cell_prefix(cell) << ',' << metric << ',' << labels[i] << ','
             << labels[j] << ',' << format_double(adj[i][j]) << ','
             << (adj[i][j] < alpha ? 1 : 0) << '\n';
        }
      }
    }

    const bool positive =
        std::all_of(mean_mofs.begin(), mean_mofs.end(), [](double v) { return v > 0.0; });
    const auto normalized = positive ? mof_norm(mean_mofs) : std::vector<double>{};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      norm << cell_prefix(cell) << ',' << labels[i] << ',' << format_double(mean_mofs[i])
           << ',' << (positive ? format_double(normalized[i]) : std::string()) << '\n';
      if (positive) {
        across_tau[{cell.function, cell.experiment}][labels[i]].push_back(normalized[i]);
      }
    }
  }
  for (const auto& [key, methods] : across_tau) {
    for (const auto& [label, v] : methods) {
      norm << key.first << ',' << key.second << ",all," << label << ",,"
           << format_double(mean(v)) << '\n';
    }
  }
  return {kw.str(), pw.str(), norm.str(), nn.str()};
}

void export_bundle(const fs::path& in, const fs::path& out) {
  fs::create_directories(out);
  const auto dirs = find_run_dirs(in);
  if (dirs.empty()) throw std::runtime_error("no run artifacts below " + in.string());

  const std::string summary = metrics_csv(in);
  write_text(out / "summary.csv", summary);
  std::istringstream summary_in(summary);
  const auto rows = parse_summary_csv(summary_in);

  const auto stats = compute_stats(rows, "mof");
  write_text(out / "kruskal.csv", stats.kruskal_csv);
  write_text(out / "pairwise.csv", stats.pairwise_csv);
  write_text(out / "mof_norm.csv", stats.mof_norm_csv);
  write_text(out / "nn_time.csv", stats.nn_time_csv);

  std::ostringstream traces;
  traces << "function,experiment,tau,method,k,n_p,run_index,t,f_best,feasible,f_star\n";
  std::ostringstream traj;
  traj << "function,experiment,schedule_seed,t,projection\n";
  std::set<std::string> seen_schedules;

  for (const auto& dir : dirs) {
    const auto config = RunConfig::load((dir / "config.json").string());
    const auto table = BestKnownTable::read_csv(dir / "bestknown.csv");
    const auto log = read_log_csv(dir / "log.csv");
    const std::string prefix = std::string(to_string(config.function)) + ',' +
                               std::string(to_string(config.experiment)) + ',' +
                               format_tau(config.tau) + ',' +
                               std::string(to_string(config.method)) + ',' +
                               std::to_string(config.predictor.k) + ',' +
                               std::to_string(config.n_p) + ',' +
                               std::to_string(config.run_index);
    for (std::size_t i = 0; i < log.size(); ++i) {
      const bool last = i + 1 == log.size() || log[i + 1].period != log[i].period;
      if (!last) continue;
      traces << prefix << ',' << log[i].period << ',' << format_double(log[i].f_best)
             << ',' << (log[i].feasible ? 1 : 0) << ','
             << format_double(table.at(log[i].period).f_star) << '\n';
    }

    const std::string key = std::string(to_string(config.function)) + '/' +
                            std::string(to_string(config.experiment)) + '/' +
                            std::to_string(config.schedule_seed());
    if (seen_schedules.insert(key).second && table.size() >= 2) {
      std::vector<std::vector<double>> xs;
      for (const auto& e : table.entries()) xs.push_back(e.x_star);
      const auto proj = pca_project_1d(xs);
      for (std::size_t t = 0; t < proj.size(); ++t) {
        traj << to_string(config.function) << ',' << to_string(config.experiment) << ','
             << config.schedule_seed() << ',' << t << ',' << format_double(proj[t]) << '\n';
      }
    }
  }
  write_text(out / "traces.csv", traces.str());
  write_text(out / "trajectories.csv", traj.str());

  json manifest;
  manifest["runs"] = dirs.size();
  manifest["files"] = {"summary.csv", "kruskal.csv", "pairwise.csv", "mof_norm.csv",
                       "nn_time.csv", "traces.csv", "trajectories.csv"};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace dyno
