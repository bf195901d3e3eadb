#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace emax::env {

struct EnvSpec {
  int n_agents = 0;
  std::vector<int> n_actions;
  std::vector<int> obs_size;
  int state_size = 0;
  int max_steps = 0;
};

struct StepOutcome {
  /// One row per agent.
  Tensor observations;
  double reward = 0.0;
  bool done = false;
  /// The episode ended on the step limit rather than a terminal state.
  bool truncated = false;
  /// Concatenation of all agent observations.
  RowVectorX<double> state;
};

/// Common-reward Dec-POMDP with a reset/step contract. Environments own no
/// randomness: every stochastic decision draws from the caller's stream.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual std::string name() const = 0;
  virtual StepOutcome reset(Rng& rng) = 0;
  virtual StepOutcome step(std::span<const int> actions, Rng& rng) = 0;
  /// Current observation without advancing the episode.
  virtual StepOutcome observe() const = 0;

  virtual std::vector<std::int64_t> save_state() const = 0;
  virtual void load_state(std::span<const std::int64_t> data) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

RowVectorX<double> flatten_rows(const Tensor& per_agent);

}  // namespace emax::env
