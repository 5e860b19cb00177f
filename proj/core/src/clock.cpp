#include "dyno/clock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dyno {

std::string_view to_string(ClockMode mode) {
  return mode == ClockMode::Real ? "real" : "virtual";
}

ClockMode parse_clock_mode(std::string_view name) {
  if (name == "real") return ClockMode::Real;
  if (name == "virtual") return ClockMode::Virtual;
  throw std::invalid_argument("unknown clock mode: " + std::string(name));
}

TimeBudget::Nanos TimeBudget::to_nanos(double seconds) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw std::invalid_argument("time amounts must be finite and >= 0");
  }
  return static_cast<Nanos>(std::llround(seconds * 1e9));
}

TimeBudget::TimeBudget(double tau_seconds, ClockMode mode, VirtualCosts costs)
    : mode_(mode),
      costs_(costs),
      tau_(to_nanos(tau_seconds)),
      evaluation_cost_(to_nanos(costs.per_evaluation)),
      batch_cost_(to_nanos(costs.per_training_batch)),
      prediction_cost_(to_nanos(costs.per_prediction)),
      wall_start_(std::chrono::steady_clock::now()) {
  if (tau_ <= 0) throw std::invalid_argument("tau must be positive");
}

TimeBudget::Nanos TimeBudget::elapsed_ns() const {
  if (mode_ == ClockMode::Virtual) return virtual_elapsed_;
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - wall_start_)
      .count();
}

void TimeBudget::advance(Account account, Nanos ns) {
  if (mode_ == ClockMode::Virtual) {
    virtual_elapsed_ += ns;
    (account == Account::EA ? ea_ : nn_) += ns;
  } else if (account == Account::NN) {
    nn_ += ns;
  }
}

void TimeBudget::attribute(Account account, Nanos ns) {
  if (account == Account::NN) nn_ += ns;
}

void TimeBudget::charge(Account account, double seconds) {
  advance(account, to_nanos(seconds));
}

void TimeBudget::charge_evaluations(std::size_t count) {
  period_evaluations_ += count;
  total_evaluations_ += count;
  if (mode_ == ClockMode::Virtual) {
    advance(Account::EA, evaluation_cost_ * static_cast<Nanos>(count));
  }
}

void TimeBudget::charge_training_batches(std::size_t count) {
  if (mode_ == ClockMode::Virtual) {
    advance(Account::NN, batch_cost_ * static_cast<Nanos>(count));
  }
}

void TimeBudget::charge_prediction() {
  if (mode_ == ClockMode::Virtual) advance(Account::NN, prediction_cost_);
}

void TimeBudget::start_period() {
  period_start_ = elapsed_ns();
  period_evaluations_ = 0;
  ++periods_started_;
}

bool TimeBudget::period_expired() const {
  return elapsed_ns() - period_start_ >= tau_;
}

double TimeBudget::ea_time() const {
  if (mode_ == ClockMode::Virtual) return to_seconds(ea_);
  return to_seconds(elapsed_ns() - nn_);
}

double TimeBudget::nn_time_fraction() const {
  const double ea = ea_time();
  const double nn = nn_time();
  if (ea + nn <= 0.0) {
    throw std::domain_error("NN time fraction undefined before any time elapsed");
  }
  return nn / (ea + nn);
}

}  // namespace dyno
