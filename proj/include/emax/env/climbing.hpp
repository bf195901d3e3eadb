#pragma once

#include "emax/env/environment.hpp"

#include <array>

namespace emax::env {

/// Two-player, three-action, single-stage common-reward matrix game.
class ClimbingGame final : public Environment {
 public:
  enum Action : int { A = 0, B = 1, C = 2 };

  static constexpr std::array<std::array<double, 3>, 3> kRewards{{
      {11.0, -30.0, 0.0},
      {-30.0, 7.0, 6.0},
      {0.0, 0.0, 5.0},
  }};

  static double reward(int a1, int a2);

  ClimbingGame();

  const EnvSpec& spec() const override { return spec_; }
  std::string name() const override { return "climbing"; }
  StepOutcome reset(Rng& rng) override;
  StepOutcome step(std::span<const int> actions, Rng& rng) override;
  StepOutcome observe() const override;

  std::vector<std::int64_t> save_state() const override { return {done_ ? 1 : 0}; }
  void load_state(std::span<const std::int64_t> data) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<ClimbingGame>(*this); }

 private:
  EnvSpec spec_;
  bool done_ = true;
};

}  // namespace emax::env
