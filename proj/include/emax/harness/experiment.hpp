#pragma once

#include "emax/deep/checkpoint.hpp"
#include "emax/deep/learner.hpp"
#include "emax/harness/config.hpp"
#include "emax/harness/metrics_io.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>

namespace emax::harness {

using MetricSink = std::function<void(const MetricRecord&)>;
using Policy = std::function<std::vector<int>(const Tensor& observations, std::span<const int> last_actions, Rng& rng)>;

/// Mean undiscounted return over `episodes` rollouts of `policy`.
double evaluate_policy(env::Environment& env, const Policy& policy, int episodes, Rng& rng);
/// Rollouts of the learner's evaluation policy (vote, or one member).
double evaluate_policy(env::Environment& env, const deep::Learner& learner, int episodes, Rng& rng,
                       std::optional<int> single_member = std::nullopt);

/// One seed of a deep run: environment, learner, replay and all rng streams.
/// Evaluation uses a fresh environment and its own stream, so it never
/// perturbs training.
class TrainingSession {
 public:
  TrainingSession(const ExperimentConfig& config, std::uint64_t seed);

  /// Advances up to `until_step` environment steps (capped at total_steps).
  void run(std::int64_t until_step, const MetricSink& sink);
  void run(const MetricSink& sink) { run(config_.total_steps, sink); }

  double evaluate();
  bool finished() const { return stopped_ || step_ >= config_.total_steps; }
  bool stopped_early() const { return stopped_; }
  std::int64_t step() const { return step_; }
  std::uint64_t seed() const { return seed_; }

  deep::Learner& learner() { return learner_; }
  const deep::ReplayBuffer& buffer() const { return buffer_; }

  deep::Checkpoint checkpoint();
  void restore(const deep::Checkpoint& ck);

 private:
  void emit(const MetricSink& sink, std::int64_t step, const std::string& metric, double value) const;
  void reset_episode();

  ExperimentConfig config_;
  std::uint64_t seed_;
  std::string run_id_;
  std::unique_ptr<env::Environment> env_;
  deep::Learner learner_;
  deep::ReplayBuffer buffer_;
  deep::RewardStandardizer standardizer_;
  Rng env_rng_, explore_rng_, replay_rng_, eval_rng_;
  env::StepOutcome current_;
  std::vector<int> last_actions_;
  double episode_return_ = 0.0;
  std::int64_t step_ = 0;
  bool stopped_ = false;
};

/// Emits the tabular climbing-game trace for one seed.
void run_tabular_seed(const ExperimentConfig& config, std::uint64_t seed, const MetricSink& sink);

struct SeedArtifacts {
  std::uint64_t seed = 0;
  std::filesystem::path metrics_path;
  std::filesystem::path checkpoint_path;
  bool ok = false;
  std::string error;
  double seconds = 0.0;
};

struct RunArtifacts {
  std::filesystem::path directory;
  std::vector<SeedArtifacts> seeds;
  std::filesystem::path timing_path;
  bool all_failed() const;
};

std::string resolved_run_id(const ExperimentConfig& config);
/// Trains every seed; a failing seed records a failure row and the rest
/// continue.
RunArtifacts run_experiment(const ExperimentConfig& config);

}  // namespace emax::harness
