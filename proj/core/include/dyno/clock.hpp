#pragma once

#include <chrono>
#include <cstdint>
#include <string_view>
#include <utility>

namespace dyno {

enum class ClockMode { Real, Virtual };
enum class Account { EA, NN };

std::string_view to_string(ClockMode mode);
ClockMode parse_clock_mode(std::string_view name);

/// Seconds charged per event when running on the virtual clock. The default
/// evaluation cost maps tau = 1 s to 2000 evaluations.
struct VirtualCosts {
  double per_evaluation = 5e-4;
  double per_training_batch = 8e-4;
  double per_prediction = 1e-3;
};

/// Per-period time budget shared by the EA and the predictor.
///
/// Virtual mode keeps time as an integer number of nanoseconds, so elapsed
/// time is exactly the sum of charged costs. Real mode reads a monotonic
/// clock; NN intervals are measured with `measure` and the EA account is the
/// remainder of the wall time.
class TimeBudget {
 public:
  using Nanos = std::int64_t;

  TimeBudget(double tau_seconds, ClockMode mode, VirtualCosts costs = {});

  ClockMode mode() const { return mode_; }
  double tau() const { return to_seconds(tau_); }
  const VirtualCosts& costs() const { return costs_; }

  /// Charges an explicit amount. In real mode this only attributes time to
  /// the NN account; EA time is derived from the wall clock.
  void charge(Account account, double seconds);

  /// Event charges. They drive the virtual clock and are no-ops for elapsed
  /// time in real mode; the evaluation counter is kept in both modes.
  void charge_evaluations(std::size_t count);
  void charge_training_batches(std::size_t count);
  void charge_prediction();

  /// Runs f and, in real mode, charges its wall duration to `account`.
  template <class F>
  decltype(auto) measure(Account account, F&& f) {
    if (mode_ == ClockMode::Virtual) return std::forward<F>(f)();
    const auto start = std::chrono::steady_clock::now();
    struct Charger {
      TimeBudget* self;
      Account account;
      std::chrono::steady_clock::time_point start;
      ~Charger() {
        const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        self->attribute(account, ns);
      }
    } charger{this, account, start};
    return std::forward<F>(f)();
  }

  /// Marks the beginning of a new change period.
  void start_period();
  bool period_expired() const;

  double elapsed() const { return to_seconds(elapsed_ns()); }
  double period_elapsed() const { return to_seconds(elapsed_ns() - period_start_); }
  double ea_time() const;
  double nn_time() const { return to_seconds(nn_); }

  std::size_t periods_started() const { return periods_started_; }
  std::size_t evaluations_in_period() const { return period_evaluations_; }
  std::size_t total_evaluations() const { return total_evaluations_; }

  /// nn_time / (ea_time + nn_time). Throws std::domain_error before any time
  /// has elapsed.
  double nn_time_fraction() const;

  static Nanos to_nanos(double seconds);
  static double to_seconds(Nanos ns) { return static_cast<double>(ns) * 1e-9; }

 private:
  Nanos elapsed_ns() const;
  void attribute(Account account, Nanos ns);
  void advance(Account account, Nanos ns);

  ClockMode mode_;
  VirtualCosts costs_;
  Nanos tau_;
  Nanos evaluation_cost_;
  Nanos batch_cost_;
  Nanos prediction_cost_;

  Nanos virtual_elapsed_ = 0;
  Nanos ea_ = 0;
  Nanos nn_ = 0;
  Nanos period_start_ = 0;
  std::chrono::steady_clock::time_point wall_start_;

  std::size_t periods_started_ = 0;
  std::size_t period_evaluations_ = 0;
  std::size_t total_evaluations_ = 0;
};

}  // namespace dyno
