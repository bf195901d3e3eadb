#pragma once

#include "emax/env/environment.hpp"

#include <utility>

namespace emax::env {

struct LbfConfig {
  int width = 5;
  int height = 5;
  int n_agents = 2;
  int n_food = 1;
  bool coop = true;
  /// Reward added per unsuccessful pick-up attempt is -penalty; 0 disables.
  double penalty = 0.05;
  int max_steps = 50;
  int max_agent_level = 3;

  void validate() const;
};

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(Cell, Cell) = default;
};

struct LbfState {
  std::vector<Cell> agents;
  std::vector<int> agent_levels;
  std::vector<Cell> foods;
  std::vector<int> food_levels;
  std::vector<bool> collected;
  int step = 0;
  bool done = false;
};

/// Level-based foraging. Agents collect food when the summed level of the
/// adjacent agents choosing pick-up reaches the food level. Fully observable.
class LevelBasedForaging final : public Environment {
 public:
  enum Action : int { Noop = 0, Up = 1, Down = 2, Left = 3, Right = 4, Pickup = 5 };

  explicit LevelBasedForaging(LbfConfig config);

  /// Admissible food levels in cooperative mode: strictly above the best
  /// single agent, at most the sum of the two strongest agents.
  static std::pair<int, int> coop_level_range(std::span<const int> agent_levels);

  const EnvSpec& spec() const override { return spec_; }
  std::string name() const override;
  StepOutcome reset(Rng& rng) override;
  StepOutcome step(std::span<const int> actions, Rng& rng) override;
  StepOutcome observe() const override;

  std::vector<std::int64_t> save_state() const override;
  void load_state(std::span<const std::int64_t> data) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<LevelBasedForaging>(*this); }

  const LbfConfig& config() const { return config_; }
  const LbfState& state() const { return state_; }
  /// Installs an explicit layout (tests and scripted scenarios).
  void set_state(LbfState state);
  double total_food_level() const { return total_food_level_; }

 private:
  bool in_bounds(Cell c) const;
  int food_at(Cell c) const;
  int agent_at(Cell c) const;

  LbfConfig config_;
  EnvSpec spec_;
  LbfState state_;
  double total_food_level_ = 0.0;
};

}  // namespace emax::env
