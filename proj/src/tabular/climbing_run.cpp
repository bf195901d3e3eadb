#include "emax/tabular/climbing_run.hpp"

#include "emax/env/climbing.hpp"
#include "emax/rng.hpp"

namespace emax::tabular {

ClimbingRun run_climbing(const TabularSettings& settings, std::uint64_t seed, std::int64_t steps,
                         std::int64_t trace_interval) {
  Rng init0 = make_stream(seed, "agent0/init");
  Rng init1 = make_stream(seed, "agent1/init");
  Rng explore = make_stream(seed, "explore");
  Rng masks = make_stream(seed, "update");
  Rng eval = make_stream(seed, "eval");

  std::array<TabularAgent, 2> agents{TabularAgent(settings, 3, init0), TabularAgent(settings, 3, init1)};

  ClimbingRun run;
  auto snapshot = [&](std::int64_t step) {
    ClimbingSnapshot s;
    s.step = step;
    for (std::size_t i = 0; i < 2; ++i) {
      s.q_values[i] = agents[i].q_values();
      s.uncertainty[i] = agents[i].uncertainty();
      s.greedy_actions[i] = agents[i].eval_action(eval);
    }
    s.greedy_reward = env::ClimbingGame::reward(s.greedy_actions[0], s.greedy_actions[1]);
    return s;
  };

  if (trace_interval > 0) run.trace.push_back(snapshot(0));
  for (std::int64_t t = 0; t < steps; ++t) {
    const int a0 = agents[0].act(t, explore);
    const int a1 = agents[1].act(t, explore);
    const double r = env::ClimbingGame::reward(a0, a1);
    agents[0].update(a0, r, masks);
    agents[1].update(a1, r, masks);
    if (trace_interval > 0 && (t + 1) % trace_interval == 0 && t + 1 < steps) run.trace.push_back(snapshot(t + 1));
  }
  ClimbingSnapshot last = snapshot(steps);
  run.final_actions = last.greedy_actions;
  run.final_reward = last.greedy_reward;
  if (trace_interval > 0) run.trace.push_back(std::move(last));
  return run;
}

}  // namespace emax::tabular
