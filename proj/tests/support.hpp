#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dyno/de.hpp"

namespace dyno::testing {

/// Static objective with an evaluation cap; every call costs one unit.
class FunctionEvaluator final : public Evaluator {
 public:
  using Objective = std::function<Fitness(std::span<const double>)>;

  FunctionEvaluator(Objective f, std::size_t cap = std::numeric_limits<std::size_t>::max())
      : f_(std::move(f)), cap_(cap) {}

  Fitness evaluate(std::span<const double> x) override {
    ++count_;
    return f_(x);
  }
  bool exhausted() const override { return count_ >= cap_; }
  std::size_t period() const override { return period_; }

  std::size_t count() const { return count_; }
  void set_period(std::size_t t) { period_ = t; }
  void set_objective(Objective f) { f_ = std::move(f); }

 private:
  Objective f_;
  std::size_t cap_;
  std::size_t count_ = 0;
  std::size_t period_ = 0;
};

inline Fitness sphere_fitness(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return {s, 0.0};
}

/// Fresh directory below the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dyno-" + tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace dyno::testing
