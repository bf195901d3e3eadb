#include "emax/harness/speedtest.hpp"

#include "emax/harness/experiment.hpp"

#include <chrono>
#include <cstdio>

namespace emax::harness {

namespace {

std::string base_algorithm(const std::string& algorithm) {
  return algorithm.ends_with("_emax") ? algorithm.substr(0, algorithm.size() - 5) : algorithm;
}

double time_run(const ExperimentConfig& config, std::uint64_t seed) {
  TrainingSession session(config, seed);
  const auto start = std::chrono::steady_clock::now();
  session.run([](const MetricRecord&) {});
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<SpeedRow> speed_benchmark(const ExperimentConfig& config, std::int64_t steps, int repeats,
                                      const std::vector<int>& ensemble_sizes) {
  if (config.family() != Family::Deep) throw Error("speed_benchmark: needs a deep algorithm");
  if (steps < 1 || repeats < 1) throw Error("speed_benchmark: steps and repeats must be positive");
  const std::string base = base_algorithm(config.algorithm);

  auto variant = [&](bool emax, int k) {
    ExperimentConfig c = config;
    c.algorithm = emax ? base + "_emax" : base;
    c.learner.emax = emax;
    c.learner.ensemble_size = k;
    c.total_steps = steps;
    c.eval_interval = steps + 1;
    c.stop_at_return.reset();
    c.eval_single_member.reset();
    c.validate();
    return c;
  };
  auto measure = [&](const ExperimentConfig& c) {
    double total = 0.0;
    for (int r = 0; r < repeats; ++r) total += time_run(c, config.seeds.front() + static_cast<std::uint64_t>(r));
    return total / repeats;
  };

  std::vector<SpeedRow> rows;
  rows.push_back(SpeedRow{base, 1, measure(variant(false, config.learner.ensemble_size)), 0.0});
  for (int k : ensemble_sizes) {
    const double t = measure(variant(true, k));
    rows.push_back(SpeedRow{base + "_emax", k, t, t / rows.front().seconds - 1.0});
  }
  return rows;
}

std::string format_speed_table(const std::vector<SpeedRow>& rows) {
  std::string out = "algorithm,ensemble_size,seconds,relative_increase\n";
  char buf[256];
  for (const SpeedRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%+.1f%%\n", r.algorithm.c_str(),
                  r.ensemble_size == 1 ? "baseline" : std::to_string(r.ensemble_size).c_str(), r.seconds,
                  100.0 * r.relative_increase);
    out += buf;
  }
  return out;
}

}  // namespace emax::harness
