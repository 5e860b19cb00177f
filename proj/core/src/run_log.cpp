#include "dyno/run_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dyno {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_log_row(std::ostream& os, const GenerationRecord& r) {
  os << r.period << ',' << r.generation << ',' << r.evals_used << ','
     << format_double(r.f_best) << ',' << (r.feasible ? 1 : 0) << ','
     << format_double(r.ea_time) << ',' << format_double(r.nn_time) << '\n';
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in log: '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<GenerationRecord> read_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kLogHeader) {
    throw std::runtime_error("unexpected log header in " + path.string());
  }
  std::vector<GenerationRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[7];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error("short log row in " + path.string());
      }
    }
    GenerationRecord r;
    r.period = static_cast<std::size_t>(parse_double(f[0]));
    r.generation = static_cast<std::size_t>(parse_double(f[1]));
    r.evals_used = static_cast<std::size_t>(parse_double(f[2]));
    r.f_best = parse_double(f[3]);
    r.feasible = f[4] == "1";
    r.ea_time = parse_double(f[5]);
    r.nn_time = parse_double(f[6]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

void validate_log(const std::vector<GenerationRecord>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool first_in_period = i == 0 || rows[i - 1].period != r.period;
    if (first_in_period) {
      if (r.generation != 1) {
        throw std::runtime_error("period " + std::to_string(r.period) +
                                 " does not start at generation 1");
      }
      continue;
    }
    const auto& prev = rows[i - 1];
    if (r.generation != prev.generation + 1) {
      throw std::runtime_error("non-consecutive generations in period " +
                               std::to_string(r.period));
    }
    if (prev.feasible && (!r.feasible || r.f_best > prev.f_best)) {
      throw std::runtime_error("best-so-far got worse in period " +
                               std::to_string(r.period));
    }
  }
}

}  // namespace dyno
