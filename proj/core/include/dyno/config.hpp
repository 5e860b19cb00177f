#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dyno/best_known.hpp"
#include "dyno/clock.hpp"
#include "dyno/de.hpp"
#include "dyno/predictor.hpp"
#include "dyno/problems.hpp"

namespace dyno {

/// Every knob of a single run. Serialized as flat JSON with all fields
/// present; the echo stored with an artifact regenerates the run.
struct RunConfig {
  FunctionKind function = FunctionKind::Sphere;
  Experiment experiment = Experiment::Exp2;
  double tau = 1.0;
  ReactionMode method = ReactionMode::NNW;
  std::size_t n_p = 3;
  PredictorConfig predictor;
  DEParams de;
  ClockMode clock = ClockMode::Virtual;
  VirtualCosts costs;
  std::size_t periods = 100;
  std::size_t dimension = 30;
  std::uint64_t base_seed = 1;
  std::size_t run_index = 0;
  /// false: one environment per (experiment, T, d, base_seed) cell, shared by
  /// all runs and methods.
  bool schedule_per_run = false;
  /// Retrain at every period boundary instead of only after a detected
  /// change. Predictions are inserted only on detected changes either way.
  bool train_every_period = true;
  std::size_t oracle_evaluations = 200000;
  std::size_t oracle_restarts = 5;
  bool dump_weights = false;

  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  std::uint64_t config_hash() const;
  std::string config_hash_hex() const;
  std::uint64_t run_seed() const { return config_hash(); }
  std::uint64_t schedule_seed() const;
  OracleSettings oracle() const;

  /// Directory-safe label, e.g. sphere-exp2-tau1-NNW-k3-np3-r0-1a2b3c4d.
  std::string label() const;
};

/// Cross product of run configurations.
struct MatrixConfig {
  RunConfig base;
  std::vector<FunctionKind> functions{FunctionKind::Sphere, FunctionKind::Rosenbrock,
                                      FunctionKind::Rastrigin};
  std::vector<Experiment> experiments{Experiment::Exp1, Experiment::Exp2,
                                      Experiment::Exp3, Experiment::Exp4};
  std::vector<double> taus{0.5, 1.0, 4.0};
  std::vector<ReactionMode> methods{ReactionMode::NoNN, ReactionMode::NNW,
                                    ReactionMode::NNR};
  std::vector<std::size_t> ks;    // empty: base value only
  std::vector<std::size_t> n_ps;  // empty: base value only
  std::size_t runs = 30;

  std::vector<RunConfig> expand() const;

  nlohmann::json to_json() const;
  static MatrixConfig from_json(const nlohmann::json& j);
  static MatrixConfig load(const std::string& path);
};

std::string format_tau(double tau);

}  // namespace dyno
