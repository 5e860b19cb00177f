#include "dyno/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "dyno/rng.hpp"
#include "dyno/run_log.hpp"

namespace dyno {

using nlohmann::json;

void RunConfig::validate() const {
  de.validate();
  predictor.validate(de.pop_size);
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (n_p == 0 || n_p > de.pop_size) throw std::invalid_argument("n_p must lie in [1, NP]");
  if (periods == 0) throw std::invalid_argument("periods must be positive");
  if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");
  if (oracle_restarts == 0 || oracle_evaluations == 0) {
    throw std::invalid_argument("oracle budget must be positive");
  }
}

json RunConfig::to_json() const {
  json j;
  j["function"] = to_string(function);
  j["experiment"] = to_string(experiment);
  j["tau"] = tau;
  j["method"] = to_string(method);
  j["k"] = predictor.k;
  j["n_p"] = n_p;
  j["n_t"] = predictor.history;
  j["n_w"] = predictor.window ? json(*predictor.window) : json(nullptr);
  j["min_batch"] = predictor.min_batch;
  j["epochs"] = predictor.epochs;
  j["batch_size"] = predictor.batch_size;
  j["sample_cap"] = predictor.sample_cap;
  j["learning_rate"] = predictor.learning_rate;
  j["noise_fraction"] = predictor.noise_fraction;
  j["pop_size"] = de.pop_size;
  j["cr"] = de.cr;
  j["f_min"] = de.f_min;
  j["f_max"] = de.f_max;
  j["lower"] = de.bounds.lower;
  j["upper"] = de.bounds.upper;
  j["clock_mode"] = to_string(clock);
  j["cost_per_evaluation"] = costs.per_evaluation;
  j["cost_per_training_batch"] = costs.per_training_batch;
  j["cost_per_prediction"] = costs.per_prediction;
  j["periods"] = periods;
  j["dimension"] = dimension;
  j["base_seed"] = base_seed;
  j["run_index"] = run_index;
  j["schedule_per_run"] = schedule_per_run;
  j["train_every_period"] = train_every_period;
  j["oracle_evaluations"] = oracle_evaluations;
  j["oracle_restarts"] = oracle_restarts;
  j["dump_weights"] = dump_weights;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  const json defaults = RunConfig{}.to_json();
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument("unknown config key: " + key);
  }
  json merged = defaults;
  merged.update(j);

  RunConfig c;
  c.function = parse_function(merged["function"].get<std::string>());
  c.experiment = parse_experiment(merged["experiment"].get<std::string>());
  c.tau = merged["tau"].get<double>();
  c.method = parse_reaction_mode(merged["method"].get<std::string>());
  c.predictor.k = merged["k"].get<std::size_t>();
  c.n_p = merged["n_p"].get<std::size_t>();
  c.predictor.history = merged["n_t"].get<std::size_t>();
  if (merged["n_w"].is_null()) {
    c.predictor.window.reset();
  } else {
    c.predictor.window = merged["n_w"].get<std::size_t>();
  }
  c.predictor.min_batch = merged["min_batch"].get<std::size_t>();
  c.predictor.epochs = merged["epochs"].get<std::size_t>();
  c.predictor.batch_size = merged["batch_size"].get<std::size_t>();
  c.predictor.sample_cap = merged["sample_cap"].get<std::size_t>();
  c.predictor.learning_rate = merged["learning_rate"].get<double>();
  c.predictor.noise_fraction = merged["noise_fraction"].get<double>();
  c.de.pop_size = merged["pop_size"].get<std::size_t>();
  c.de.cr = merged["cr"].get<double>();
  c.de.f_min = merged["f_min"].get<double>();
  c.de.f_max = merged["f_max"].get<double>();
  c.de.bounds = {merged["lower"].get<double>(), merged["upper"].get<double>()};
  c.clock = parse_clock_mode(merged["clock_mode"].get<std::string>());
  c.costs.per_evaluation = merged["cost_per_evaluation"].get<double>();
  c.costs.per_training_batch = merged["cost_per_training_batch"].get<double>();
  c.costs.per_prediction = merged["cost_per_prediction"].get<double>();
  c.periods = merged["periods"].get<std::size_t>();
  c.dimension = merged["dimension"].get<std::size_t>();
  c.base_seed = merged["base_seed"].get<std::uint64_t>();
  c.run_index = merged["run_index"].get<std::size_t>();
  c.schedule_per_run = merged["schedule_per_run"].get<bool>();
  c.train_every_period = merged["train_every_period"].get<bool>();
  c.oracle_evaluations = merged["oracle_evaluations"].get<std::size_t>();
  c.oracle_restarts = merged["oracle_restarts"].get<std::size_t>();
  c.dump_weights = merged["dump_weights"].get<bool>();
  c.validate();
  return c;
}

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return json::parse(in);
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  return from_json(read_json_file(path));
}

std::uint64_t RunConfig::config_hash() const { return fnv1a(to_json().dump()); }

std::string RunConfig::config_hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash()));
  return buf;
}

std::uint64_t RunConfig::schedule_seed() const {
  if (schedule_per_run) return mix_seed(run_seed(), 0x5c4edULL);
  std::uint64_t h = fnv1a("schedule");
  h = fnv1a(to_string(experiment), h);
  h = mix_seed(h, periods);
  h = mix_seed(h, dimension);
  return mix_seed(h, base_seed);
}

OracleSettings RunConfig::oracle() const {
  OracleSettings s;
  s.evaluations = oracle_evaluations;
  s.restarts = oracle_restarts;
  return s;
}

std::string format_tau(double tau) { return format_double(tau); }

std::string RunConfig::label() const {
  return std::string(to_string(function)) + "-" + std::string(to_string(experiment)) +
         "-tau" + format_tau(tau) + "-" + std::string(to_string(method)) + "-k" +
         std::to_string(predictor.k) + "-np" + std::to_string(n_p) + "-r" +
         std::to_string(run_index) + "-" + config_hash_hex().substr(0, 8);
}

std::vector<RunConfig> MatrixConfig::expand() const {
  const std::vector<std::size_t> k_values = ks.empty() ? std::vector{base.predictor.k} : ks;
  const std::vector<std::size_t> np_values = n_ps.empty() ? std::vector{base.n_p} : n_ps;
  std::vector<RunConfig> out;
  for (auto fn : functions)
    for (auto exp : experiments)
      for (double tau : taus)
        for (auto method : methods)
          for (auto k : k_values)
            for (auto np : np_values)
              for (std::size_t r = 0; r < runs; ++r) {
                RunConfig c = base;
                c.function = fn;
                c.experiment = exp;
                c.tau = tau;
                c.method = method;
                c.predictor.k = k;
                c.n_p = np;
                c.run_index = r;
                c.validate();
                out.push_back(c);
              }
  return out;
}

json MatrixConfig::to_json() const {
  json j;
  j["base"] = base.to_json();
  for (auto f : functions) j["functions"].push_back(to_string(f));
  for (auto e : experiments) j["experiments"].push_back(to_string(e));
  j["taus"] = taus;
  for (auto m : methods) j["methods"].push_back(to_string(m));
  j["k"] = ks;
  j["n_p"] = n_ps;
  j["runs"] = runs;
  return j;
}

MatrixConfig MatrixConfig::from_json(const json& j) {
  static const std::set<std::string> known{"base", "functions", "experiments", "taus",
                                           "methods", "k", "n_p", "runs"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown matrix key: " + key);
  }
  MatrixConfig m;
  if (j.contains("base")) m.base = RunConfig::from_json(j["base"]);
  if (j.contains("functions")) {
    m.functions.clear();
    for (const auto& f : j["functions"]) m.functions.push_back(parse_function(f.get<std::string>()));
  }
  if (j.contains("experiments")) {
    m.experiments.clear();
    for (const auto& e : j["experiments"]) m.experiments.push_back(parse_experiment(e.get<std::string>()));
  }
  if (j.contains("taus")) m.taus = j["taus"].get<std::vector<double>>();
  if (j.contains("methods")) {
    m.methods.clear();
    for (const auto& x : j["methods"]) m.methods.push_back(parse_reaction_mode(x.get<std::string>()));
  }
  if (j.contains("k")) m.ks = j["k"].get<std::vector<std::size_t>>();
  if (j.contains("n_p")) m.n_ps = j["n_p"].get<std::vector<std::size_t>>();
  if (j.contains("runs")) m.runs = j["runs"].get<std::size_t>();
  return m;
}

MatrixConfig MatrixConfig::load(const std::string& path) {
  return from_json(read_json_file(path));
}

}  // namespace dyno
