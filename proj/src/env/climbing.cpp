#include "emax/env/climbing.hpp"

namespace emax::env {

RowVectorX<double> flatten_rows(const Tensor& per_agent) {
  return Eigen::Map<const RowVectorX<double>>(per_agent.data(), per_agent.size());
}

double ClimbingGame::reward(int a1, int a2) {
  if (a1 < 0 || a1 > 2 || a2 < 0 || a2 > 2) throw Error("climbing: invalid action");
  return kRewards[static_cast<std::size_t>(a1)][static_cast<std::size_t>(a2)];
}

ClimbingGame::ClimbingGame() {
  spec_.n_agents = 2;
  spec_.n_actions = {3, 3};
  spec_.obs_size = {1, 1};
  spec_.state_size = 2;
  spec_.max_steps = 1;
}

StepOutcome ClimbingGame::observe() const {
  StepOutcome out;
  out.observations = Tensor::Ones(2, 1);
  out.state = flatten_rows(out.observations);
  out.done = done_;
  return out;
}

StepOutcome ClimbingGame::reset(Rng&) {
  done_ = false;
  return observe();
}

StepOutcome ClimbingGame::step(std::span<const int> actions, Rng&) {
  if (done_) throw Error("climbing: step after episode end");
  if (actions.size() != 2) throw Error("climbing: expected two actions");
  const double r = reward(actions[0], actions[1]);
  done_ = true;
  StepOutcome out = observe();
  out.reward = r;
  return out;
}

void ClimbingGame::load_state(std::span<const std::int64_t> data) {
  if (data.size() != 1) throw Error("climbing: malformed state");
  done_ = data[0] != 0;
}

}  // namespace emax::env
