#pragma once

#include "emax/deep/losses.hpp"
#include "emax/deep/schedule.hpp"
#include "emax/env/environment.hpp"
#include "emax/optim.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace emax::deep {

struct LearnerConfig {
  Mixing mixing = Mixing::Independent;
  bool emax = false;
  int ensemble_size = 5;
  double beta = 0.3;
  double gamma = 0.99;
  double lr = 1e-4;
  double max_grad_norm = 5.0;
  int hidden_size = 128;
  int batch_size = 1024;
  std::int64_t target_interval = 200;
  EpsilonSchedule epsilon;
  int mixer_embed = 32;
  int hypernet_embed = 64;
  bool agent_id_input = false;

  int members() const { return emax ? ensemble_size : 1; }
  void validate() const;
};

struct UpdateStats {
  double loss = 0.0;
  double grad_norm = 0.0;
  /// Norm measured before clipping.
  double raw_grad_norm = 0.0;
};

/// Parameter-shared value learner for all agents: a single net with a
/// delayed target copy (baselines) or an ensemble of K nets (EMAX), plus an
/// optional QMIX mixer with its delayed copy.
class Learner {
 public:
  Learner(const LearnerConfig& config, const env::EnvSpec& spec, std::uint64_t seed);

  const LearnerConfig& config() const { return config_; }
  const InputLayout& layout() const { return layout_; }
  int members() const { return static_cast<int>(members_.size()); }

  /// Baselines: epsilon-greedy with epsilon(t). EMAX: UCB over the ensemble.
  std::vector<int> act_training(const Tensor& observations, std::span<const int> last_actions, std::int64_t t,
                                Rng& rng) const;
  /// Baselines: eval-epsilon greedy. EMAX: eval-epsilon majority vote, or the
  /// greedy action of one member when `single_member` is set.
  std::vector<int> act_evaluation(const Tensor& observations, std::span<const int> last_actions, Rng& rng,
                                  std::optional<int> single_member = std::nullopt) const;

  /// One gradient step from the buffer.
  /// One gradient step. With `rewards` set, sampled rewards are standardized
  /// with its current statistics before the targets are formed.
  UpdateStats update(const ReplayBuffer& buffer, Rng& rng, const RewardStandardizer* rewards = nullptr);
  std::int64_t update_count() const { return update_count_; }

  /// Per-member action values for a block of agent input rows.
  std::vector<Tensor> member_values(const Tensor& inputs) const;

  std::vector<ValueNet>& members_mut() { return members_; }
  const std::vector<ValueNet>& members_ref() const { return members_; }
  ValueNet* target_net() { return config_.emax ? nullptr : &target_; }
  QmixMixer* mixer() { return config_.mixing == Mixing::Qmix ? &mixer_ : nullptr; }
  QmixMixer* target_mixer() { return config_.mixing == Mixing::Qmix ? &target_mixer_ : nullptr; }

  /// Parameters updated by the optimiser.
  std::vector<ad::Parameter*> trainable();
  /// Every parameter including delayed copies, in a fixed order.
  std::vector<ad::Parameter*> all_parameters();
  ad::AdamState& optimizer() { return adam_; }
  void set_update_count(std::int64_t n) { update_count_ = n; }

 private:
  LearnerConfig config_;
  InputLayout layout_;
  std::vector<ValueNet> members_;
  ValueNet target_;
  QmixMixer mixer_;
  QmixMixer target_mixer_;
  ad::AdamState adam_;
  std::int64_t update_count_ = 0;
};

}  // namespace emax::deep
