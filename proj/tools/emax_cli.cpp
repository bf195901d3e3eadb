#include "emax/harness/experiment.hpp"
#include "emax/harness/report.hpp"
#include "emax/harness/speedtest.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace emax;
using namespace emax::harness;

namespace {

int cmd_train(const std::string& config_path) {
  const ExperimentConfig config = load_config(config_path);
  const RunArtifacts art = run_experiment(config);
  for (const SeedArtifacts& s : art.seeds) {
    std::cout << "seed " << s.seed << ": " << (s.ok ? "ok" : "FAILED (" + s.error + ")") << " in " << s.seconds
              << " s -> " << s.metrics_path.string() << '\n';
  }
  return art.all_failed() ? 2 : 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path, int episodes,
             std::optional<int> single_member) {
  ExperimentConfig config = load_config(config_path);
  if (config.family() != Family::Deep) throw ConfigError("field 'algorithm': eval needs a deep algorithm");
  if (episodes > 0) config.eval_episodes = episodes;
  if (single_member) config.eval_single_member = single_member;
  config.validate();
  const deep::Checkpoint ck = deep::Checkpoint::load(checkpoint_path);
  TrainingSession session(config, static_cast<std::uint64_t>(ck.scalar_int("seed")));
  session.restore(ck);
  const double ret = session.evaluate();
  std::cout << "algorithm=" << config.algorithm << " task=" << config.task() << " step=" << session.step()
            << " episodes=" << config.eval_episodes << " mean_return=" << format_value(ret) << '\n';
  return 0;
}

int cmd_speedtest(const std::string& config_path, std::int64_t steps, int repeats) {
  const ExperimentConfig config = load_config(config_path);
  if (config.family() != Family::Deep) throw ConfigError("field 'algorithm': speedtest needs a deep algorithm");
  std::cout << format_speed_table(speed_benchmark(config, steps, repeats));
  return 0;
}

int cmd_metrics(const std::string& dir) {
  std::cout << metrics_report(collect_metrics(dir));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble value functions for cooperative multi-agent exploration"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, dir;
  int episodes = 0;
  std::optional<int> single_member;
  std::int64_t steps = 10000;
  int repeats = 10;

  auto* train = app.add_subcommand("train", "Train every seed of a config");
  train->add_option("config", config_path, "JSON config")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a saved checkpoint");
  eval->add_option("checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval->add_option("config", config_path, "JSON config used for training")->required();
  eval->add_option("--episodes", episodes, "Override the number of evaluation episodes");
  eval->add_option("--single-member", single_member, "Evaluate one ensemble member instead of the vote");

  auto* speed = app.add_subcommand("speedtest", "Time training steps for the baseline and K = 2, 5, 8");
  speed->add_option("config", config_path, "JSON config")->required();
  speed->add_option("--steps", steps, "Environment steps per measurement");
  speed->add_option("--repeats", repeats, "Measurements averaged per row");

  auto* metrics = app.add_subcommand("metrics", "Aggregate the metrics CSVs in a directory");
  metrics->add_option("dir", dir, "Directory searched recursively for CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path);
    if (*eval) return cmd_eval(checkpoint_path, config_path, episodes, single_member);
    if (*speed) return cmd_speedtest(config_path, steps, repeats);
    if (*metrics) return cmd_metrics(dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
