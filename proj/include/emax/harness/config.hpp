#pragma once

#include "emax/deep/learner.hpp"
#include "emax/env/factory.hpp"
#include "emax/tabular/tabular.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emax::harness {

struct ConfigError : Error {
  using Error::Error;
};

enum class Family { Tabular, Deep };

struct ExperimentConfig {
  /// idqn, vdn, qmix, idqn_emax, vdn_emax, qmix_emax, or a tabular variant
  /// (iql_eps, iql_ucb, ens_iql_eps, ens_iql_ucb).
  std::string algorithm = "idqn_emax";
  env::EnvConfig env = env::LbfConfig{};
  std::string run_id;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::int64_t total_steps = 200000;
  std::int64_t eval_interval = 10000;
  int eval_episodes = 10;
  std::string output_dir = "runs";

  tabular::TabularSettings tabular;

  deep::LearnerConfig learner;
  std::int64_t buffer_capacity = 200000;
  std::int64_t warmup_steps = 1000;
  std::int64_t train_interval = 1;
  bool reward_standardization = true;
  /// Evaluate one ensemble member instead of the vote.
  std::optional<int> eval_single_member;
  /// Stop a seed once an evaluation reaches this mean return.
  std::optional<double> stop_at_return;
  bool save_checkpoint = true;

  Family family() const;
  std::string task() const;
  void validate() const;
};

/// Defaults for an algorithm: the best tabular grid configuration, or the
/// shared deep hyperparameters for LBF/BPUSH.
ExperimentConfig default_config(const std::string& algorithm);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every field spelled out.
std::string serialize_config(const ExperimentConfig& config);

std::string env_name(const env::EnvConfig& env);
/// Short task identifier such as lbf-5x5-2p-1f-coop-pen.
std::string task_id(const env::EnvConfig& env);

}  // namespace emax::harness
