#pragma once

#include "emax/tabular/tabular.hpp"

#include <array>
#include <functional>

namespace emax::tabular {

struct ClimbingSnapshot {
  std::int64_t step = 0;
  std::array<ValueRow, 2> q_values;
  std::array<ValueRow, 2> uncertainty;
  std::array<int, 2> greedy_actions{};
  double greedy_reward = 0.0;
};

struct ClimbingRun {
  std::array<int, 2> final_actions{};
  double final_reward = 0.0;
  std::vector<ClimbingSnapshot> trace;
};

/// Trains two independent tabular learners on the climbing game for `steps`
/// joint interactions. A snapshot is taken before training, every
/// `trace_interval` steps (0 disables) and at the end.
ClimbingRun run_climbing(const TabularSettings& settings, std::uint64_t seed, std::int64_t steps,
                         std::int64_t trace_interval = 0);

}  // namespace emax::tabular
