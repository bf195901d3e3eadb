#include "emax/env/lbf.hpp"

#include "emax/rng.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <tuple>
#include <numeric>

namespace emax::env {

namespace {

constexpr std::array<Cell, 4> kNeighbours{{{0, -1}, {0, 1}, {-1, 0}, {1, 0}}};

Cell offset(Cell c, int action) {
  switch (action) {
    case LevelBasedForaging::Up: return {c.x, c.y - 1};
    case LevelBasedForaging::Down: return {c.x, c.y + 1};
    case LevelBasedForaging::Left: return {c.x - 1, c.y};
    case LevelBasedForaging::Right: return {c.x + 1, c.y};
    default: return c;
  }
}

}  // namespace

void LbfConfig::validate() const {
  if (width < 1 || height < 1) throw Error("lbf: grid dimensions must be positive");
  if (n_agents < 1) throw Error("lbf: n_agents must be >= 1");
  if (n_food < 1) throw Error("lbf: n_food must be >= 1");
  if (max_agent_level < 1) throw Error("lbf: max_agent_level must be >= 1");
  if (max_steps < 1) throw Error("lbf: max_steps must be >= 1");
  if (penalty < 0.0) throw Error("lbf: penalty must be >= 0");
  if (coop && n_agents < 2) throw Error("lbf: cooperative food needs at least two agents");
  if (width * height < n_agents + n_food) throw Error("lbf: grid too small to place all entities");
}

LevelBasedForaging::LevelBasedForaging(LbfConfig config) : config_(config) {
  config_.validate();
  spec_.n_agents = config_.n_agents;
  spec_.n_actions.assign(static_cast<std::size_t>(config_.n_agents), 6);
  const int obs = 3 * (config_.n_agents + config_.n_food);
  spec_.obs_size.assign(static_cast<std::size_t>(config_.n_agents), obs);
  spec_.state_size = obs * config_.n_agents;
  spec_.max_steps = config_.max_steps;
  state_.done = true;
}

std::string LevelBasedForaging::name() const {
  std::string n = "lbf-" + std::to_string(config_.width) + "x" + std::to_string(config_.height) + "-" +
                  std::to_string(config_.n_agents) + "p-" + std::to_string(config_.n_food) + "f";
  if (config_.coop) n += "-coop";
  if (config_.penalty > 0.0) n += "-pen";
  return n;
}

std::pair<int, int> LevelBasedForaging::coop_level_range(std::span<const int> agent_levels) {
  if (agent_levels.size() < 2) throw Error("lbf: cooperative levels need at least two agents");
  std::vector<int> sorted(agent_levels.begin(), agent_levels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return {sorted[0] + 1, sorted[0] + sorted[1]};
}

bool LevelBasedForaging::in_bounds(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < config_.width && c.y < config_.height;
}

int LevelBasedForaging::food_at(Cell c) const {
  for (std::size_t f = 0; f < state_.foods.size(); ++f)
    if (!state_.collected[f] && state_.foods[f] == c) return static_cast<int>(f);
  return -1;
}

int LevelBasedForaging::agent_at(Cell c) const {
  for (std::size_t a = 0; a < state_.agents.size(); ++a)
    if (state_.agents[a] == c) return static_cast<int>(a);
  return -1;
}

StepOutcome LevelBasedForaging::reset(Rng& rng) {
  LbfState s;
  const auto n_agents = static_cast<std::size_t>(config_.n_agents);
  const auto n_food = static_cast<std::size_t>(config_.n_food);

  s.agent_levels.resize(n_agents);
  for (int& level : s.agent_levels) level = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config_.max_agent_level)));

  // Food sits off the border when the grid allows it and never touches
  // another food (8-neighbourhood), so every food keeps free access cells.
  const bool interior = config_.width >= 3 && config_.height >= 3;
  auto food_ok = [&](Cell c) {
    if (interior && (c.x == 0 || c.y == 0 || c.x == config_.width - 1 || c.y == config_.height - 1)) return false;
    for (Cell f : s.foods)
      if (std::abs(f.x - c.x) <= 1 && std::abs(f.y - c.y) <= 1) return false;
    return true;
  };
  for (std::size_t f = 0; f < n_food; ++f) {
    std::vector<Cell> options;
    for (int y = 0; y < config_.height; ++y)
      for (int x = 0; x < config_.width; ++x)
        if (food_ok({x, y})) options.push_back({x, y});
    if (options.empty()) throw Error("lbf: grid too small to place food");
    s.foods.push_back(options[uniform_index(rng, options.size())]);
  }

  for (std::size_t a = 0; a < n_agents; ++a) {
    std::vector<Cell> options;
    for (int y = 0; y < config_.height; ++y) {
      for (int x = 0; x < config_.width; ++x) {
        const Cell c{x, y};
        const bool taken = std::find(s.foods.begin(), s.foods.end(), c) != s.foods.end() ||
                           std::find(s.agents.begin(), s.agents.end(), c) != s.agents.end();
        if (!taken) options.push_back(c);
      }
    }
    if (options.empty()) throw Error("lbf: grid too small to place agents");
    s.agents.push_back(options[uniform_index(rng, options.size())]);
  }

  s.food_levels.resize(n_food);
  int lo = 1;
  int hi = config_.max_agent_level;
  if (config_.coop) {
    std::tie(lo, hi) = coop_level_range(s.agent_levels);
  } else {
    hi = std::accumulate(s.agent_levels.begin(), s.agent_levels.end(), 0);
    hi = std::min(hi, config_.max_agent_level);
  }
  for (int& level : s.food_levels) level = lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));

  s.collected.assign(n_food, false);
  s.step = 0;
  s.done = false;
  set_state(std::move(s));
  return observe();
}

void LevelBasedForaging::set_state(LbfState s) {
  if (s.agents.size() != static_cast<std::size_t>(config_.n_agents) || s.agent_levels.size() != s.agents.size())
    throw Error("lbf: state has wrong agent count");
  if (s.foods.size() != static_cast<std::size_t>(config_.n_food) || s.food_levels.size() != s.foods.size())
    throw Error("lbf: state has wrong food count");
  if (s.collected.size() != s.foods.size()) s.collected.assign(s.foods.size(), false);
  state_ = std::move(s);
  total_food_level_ = std::accumulate(state_.food_levels.begin(), state_.food_levels.end(), 0.0);
}

StepOutcome LevelBasedForaging::observe() const {
  const auto n_agents = static_cast<Index>(config_.n_agents);
  const auto n_food = static_cast<Index>(config_.n_food);
  StepOutcome out;
  out.observations.resize(n_agents, 3 * (n_agents + n_food));
  for (Index i = 0; i < n_agents; ++i) {
    Index col = 0;
    auto put = [&](double x, double y, double level) {
      out.observations(i, col++) = x;
      out.observations(i, col++) = y;
      out.observations(i, col++) = level;
    };
    auto put_agent = [&](Index a) {
      const Cell c = state_.agents[static_cast<std::size_t>(a)];
      put(c.x, c.y, state_.agent_levels[static_cast<std::size_t>(a)]);
    };
    put_agent(i);
    for (Index a = 0; a < n_agents; ++a)
      if (a != i) put_agent(a);
    for (Index f = 0; f < n_food; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      if (state_.collected[fi]) put(-1.0, -1.0, 0.0);
      else put(state_.foods[fi].x, state_.foods[fi].y, state_.food_levels[fi]);
    }
  }
  out.state = flatten_rows(out.observations);
  out.done = state_.done;
  return out;
}

StepOutcome LevelBasedForaging::step(std::span<const int> actions, Rng& rng) {
  if (state_.done) throw Error("lbf: step after episode end");
  if (actions.size() != static_cast<std::size_t>(config_.n_agents)) throw Error("lbf: wrong number of actions");
  for (int a : actions)
    if (a < 0 || a > Pickup) throw Error("lbf: invalid action " + std::to_string(a));

  // Movement, resolved in a random agent order; blocked agents stay.
  std::vector<std::size_t> order(actions.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t a : order) {
    const int act = actions[a];
    if (act == Noop || act == Pickup) continue;
    const Cell target = offset(state_.agents[a], act);
    if (!in_bounds(target) || food_at(target) >= 0 || agent_at(target) >= 0) continue;
    state_.agents[a] = target;
  }

  // Each loading agent commits to its first adjacent food (up, down, left, right).
  std::vector<int> loader_food(actions.size(), -1);
  std::vector<int> load(state_.foods.size(), 0);
  for (std::size_t a = 0; a < actions.size(); ++a) {
    if (actions[a] != Pickup) continue;
    for (Cell d : kNeighbours) {
      const int f = food_at({state_.agents[a].x + d.x, state_.agents[a].y + d.y});
      if (f >= 0) {
        loader_food[a] = f;
        load[static_cast<std::size_t>(f)] += state_.agent_levels[a];
        break;
      }
    }
  }

  double reward = 0.0;
  std::vector<bool> picked(state_.foods.size(), false);
  for (std::size_t f = 0; f < state_.foods.size(); ++f) {
    if (load[f] > 0 && load[f] >= state_.food_levels[f]) {
      picked[f] = true;
      reward += state_.food_levels[f] / total_food_level_;
    }
  }
  for (std::size_t a = 0; a < actions.size(); ++a) {
    if (actions[a] != Pickup) continue;
    const int f = loader_food[a];
    if (f < 0 || !picked[static_cast<std::size_t>(f)]) reward -= config_.penalty;
  }
  for (std::size_t f = 0; f < picked.size(); ++f)
    if (picked[f]) state_.collected[f] = true;

  state_.step += 1;
  const bool cleared = std::all_of(state_.collected.begin(), state_.collected.end(), [](bool c) { return c; });
  state_.done = cleared || state_.step >= config_.max_steps;

  StepOutcome out = observe();
  out.reward = reward;
  out.truncated = state_.done && !cleared;
  return out;
}

std::vector<std::int64_t> LevelBasedForaging::save_state() const {
  std::vector<std::int64_t> data{state_.step, state_.done ? 1 : 0};
  for (std::size_t a = 0; a < state_.agents.size(); ++a) {
    data.push_back(state_.agents[a].x);
    data.push_back(state_.agents[a].y);
    data.push_back(state_.agent_levels[a]);
  }
  for (std::size_t f = 0; f < state_.foods.size(); ++f) {
    data.push_back(state_.foods[f].x);
    data.push_back(state_.foods[f].y);
    data.push_back(state_.food_levels[f]);
    data.push_back(state_.collected[f] ? 1 : 0);
  }
  return data;
}

void LevelBasedForaging::load_state(std::span<const std::int64_t> data) {
  const auto n_agents = static_cast<std::size_t>(config_.n_agents);
  const auto n_food = static_cast<std::size_t>(config_.n_food);
  if (data.size() != 2 + 3 * n_agents + 4 * n_food) throw Error("lbf: malformed state");
  LbfState s;
  s.step = static_cast<int>(data[0]);
  s.done = data[1] != 0;
  std::size_t k = 2;
  for (std::size_t a = 0; a < n_agents; ++a) {
    s.agents.push_back({static_cast<int>(data[k]), static_cast<int>(data[k + 1])});
    s.agent_levels.push_back(static_cast<int>(data[k + 2]));
    k += 3;
  }
  for (std::size_t f = 0; f < n_food; ++f) {
    s.foods.push_back({static_cast<int>(data[k]), static_cast<int>(data[k + 1])});
    s.food_levels.push_back(static_cast<int>(data[k + 2]));
    s.collected.push_back(data[k + 3] != 0);
    k += 4;
  }
  set_state(std::move(s));
}

}  // namespace emax::env
