#pragma once

#include "emax/env/environment.hpp"
#include "emax/env/lbf.hpp"

namespace emax::env {

struct BpushConfig {
  int width = 8;
  int height = 8;
  int n_agents = 2;
  int max_steps = 50;

  void validate() const;
};

enum class Heading : int { North = 0, East = 1, South = 2, West = 3 };

struct BpushState {
  /// Top-left cell of the boulder. The boulder spans n_agents cells
  /// perpendicular to the push heading.
  Cell boulder;
  Heading heading = Heading::North;
  std::vector<Cell> agents;
  int step = 0;
  bool done = false;
};

/// Boulder-push: every agent must stand directly behind the boulder and move
/// in the push heading at the same step for the boulder to advance.
class BoulderPush final : public Environment {
 public:
  enum Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

  static constexpr double kPushReward = 0.1;
  static constexpr double kGoalReward = 1.0;
  static constexpr double kMiscoordinationPenalty = -0.01;

  explicit BoulderPush(BpushConfig config);

  const EnvSpec& spec() const override { return spec_; }
  std::string name() const override;
  StepOutcome reset(Rng& rng) override;
  StepOutcome step(std::span<const int> actions, Rng& rng) override;
  StepOutcome observe() const override;

  std::vector<std::int64_t> save_state() const override;
  void load_state(std::span<const std::int64_t> data) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<BoulderPush>(*this); }

  const BpushConfig& config() const { return config_; }
  const BpushState& state() const { return state_; }
  void set_state(BpushState state);

  std::vector<Cell> boulder_cells() const;
  /// Cells agents must occupy to push, aligned with boulder_cells().
  std::vector<Cell> push_slots() const;
  /// Pushes still needed before the boulder touches its target edge.
  int distance_to_goal() const;
  /// Action that moves an agent along the push heading.
  int push_action() const;

 private:
  bool in_bounds(Cell c) const;
  bool on_boulder(Cell c) const;

  BpushConfig config_;
  EnvSpec spec_;
  BpushState state_;
};

}  // namespace emax::env
