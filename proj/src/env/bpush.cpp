#include "emax/env/bpush.hpp"

#include "emax/rng.hpp"

#include <algorithm>
#include <numeric>

namespace emax::env {

namespace {

Cell heading_delta(Heading h) {
  switch (h) {
    case Heading::North: return {0, -1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, 1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

Cell move(Cell c, int action) {
  switch (action) {
    case BoulderPush::Up: return {c.x, c.y - 1};
    case BoulderPush::Down: return {c.x, c.y + 1};
    case BoulderPush::Left: return {c.x - 1, c.y};
    case BoulderPush::Right: return {c.x + 1, c.y};
    default: return c;
  }
}

bool vertical(Heading h) { return h == Heading::North || h == Heading::South; }

}  // namespace

void BpushConfig::validate() const {
  if (n_agents < 1) throw Error("bpush: n_agents must be >= 1");
  if (max_steps < 1) throw Error("bpush: max_steps must be >= 1");
  // The boulder needs one free row behind it and one row of travel in
  // either orientation, plus room for the agents.
  if (width < n_agents || height < n_agents || width < 3 || height < 3)
    throw Error("bpush: grid too small for a boulder of width " + std::to_string(n_agents));
  if (width * height < 2 * n_agents) throw Error("bpush: grid too small to place agents");
}

BoulderPush::BoulderPush(BpushConfig config) : config_(config) {
  config_.validate();
  spec_.n_agents = config_.n_agents;
  spec_.n_actions.assign(static_cast<std::size_t>(config_.n_agents), 4);
  const int obs = 2 + 2 * config_.n_agents + 4;
  spec_.obs_size.assign(static_cast<std::size_t>(config_.n_agents), obs);
  spec_.state_size = obs * config_.n_agents;
  spec_.max_steps = config_.max_steps;
  state_.done = true;
}

std::string BoulderPush::name() const {
  return "bpush-" + std::to_string(config_.width) + "x" + std::to_string(config_.height) + "-" +
         std::to_string(config_.n_agents) + "ag";
}

bool BoulderPush::in_bounds(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < config_.width && c.y < config_.height;
}

std::vector<Cell> BoulderPush::boulder_cells() const {
  std::vector<Cell> cells;
  const bool horizontal = vertical(state_.heading);
  for (int j = 0; j < config_.n_agents; ++j)
    cells.push_back(horizontal ? Cell{state_.boulder.x + j, state_.boulder.y} : Cell{state_.boulder.x, state_.boulder.y + j});
  return cells;
}

std::vector<Cell> BoulderPush::push_slots() const {
  const Cell d = heading_delta(state_.heading);
  std::vector<Cell> slots = boulder_cells();
  for (Cell& c : slots) c = {c.x - d.x, c.y - d.y};
  return slots;
}

bool BoulderPush::on_boulder(Cell c) const {
  const auto cells = boulder_cells();
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

int BoulderPush::distance_to_goal() const {
  switch (state_.heading) {
    case Heading::North: return state_.boulder.y;
    case Heading::South: return config_.height - 1 - state_.boulder.y;
    case Heading::West: return state_.boulder.x;
    case Heading::East: return config_.width - 1 - state_.boulder.x;
  }
  return 0;
}

int BoulderPush::push_action() const {
  switch (state_.heading) {
    case Heading::North: return Up;
    case Heading::South: return Down;
    case Heading::West: return Left;
    case Heading::East: return Right;
  }
  return Up;
}

StepOutcome BoulderPush::reset(Rng& rng) {
  BpushState s;
  s.heading = static_cast<Heading>(uniform_index(rng, 4));
  const int n = config_.n_agents;
  // Anchor ranges keep the boulder off its target edge with the push row in bounds.
  int x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  if (vertical(s.heading)) {
    x_lo = 0;
    x_hi = config_.width - n;
    y_lo = 1;
    y_hi = config_.height - 2;
  } else {
    x_lo = 1;
    x_hi = config_.width - 2;
    y_lo = 0;
    y_hi = config_.height - n;
  }
  s.boulder.x = x_lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(x_hi - x_lo + 1)));
  s.boulder.y = y_lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(y_hi - y_lo + 1)));
  state_ = s;

  std::vector<Cell> free;
  for (int y = 0; y < config_.height; ++y)
    for (int x = 0; x < config_.width; ++x)
      if (!on_boulder({x, y})) free.push_back({x, y});
  if (free.size() < static_cast<std::size_t>(n)) throw Error("bpush: grid too small to place agents");
  for (int a = 0; a < n; ++a) {
    const std::size_t pick = uniform_index(rng, free.size());
    s.agents.push_back(free[pick]);
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  s.step = 0;
  s.done = false;
  set_state(std::move(s));
  return observe();
}

void BoulderPush::set_state(BpushState s) {
  if (s.agents.size() != static_cast<std::size_t>(config_.n_agents)) throw Error("bpush: state has wrong agent count");
  state_ = std::move(s);
}

StepOutcome BoulderPush::observe() const {
  const auto n = static_cast<Index>(config_.n_agents);
  RowVectorX<double> shared(2 + 2 * n + 4);
  shared(0) = state_.boulder.x;
  shared(1) = state_.boulder.y;
  for (Index a = 0; a < n; ++a) {
    shared(2 + 2 * a) = state_.agents[static_cast<std::size_t>(a)].x;
    shared(3 + 2 * a) = state_.agents[static_cast<std::size_t>(a)].y;
  }
  shared.tail(4).setZero();
  shared(2 + 2 * n + static_cast<int>(state_.heading)) = 1.0;

  StepOutcome out;
  out.observations = shared.replicate(n, 1);
  out.state = flatten_rows(out.observations);
  out.done = state_.done;
  return out;
}

StepOutcome BoulderPush::step(std::span<const int> actions, Rng& rng) {
  if (state_.done) throw Error("bpush: step after episode end");
  if (actions.size() != static_cast<std::size_t>(config_.n_agents)) throw Error("bpush: wrong number of actions");
  for (int a : actions)
    if (a < Up || a > Right) throw Error("bpush: invalid action " + std::to_string(a));

  const auto slots = push_slots();
  const int push = push_action();
  int pushers = 0;
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const bool behind = std::find(slots.begin(), slots.end(), state_.agents[a]) != slots.end();
    pushers += behind && actions[a] == push;
  }

  double reward = 0.0;
  bool reached = false;
  if (pushers == config_.n_agents) {
    const Cell d = heading_delta(state_.heading);
    state_.boulder = {state_.boulder.x + d.x, state_.boulder.y + d.y};
    for (Cell& c : state_.agents) c = {c.x + d.x, c.y + d.y};
    reward += kPushReward * config_.n_agents;
    if (distance_to_goal() == 0) {
      reward += kGoalReward * config_.n_agents;
      reached = true;
    }
  } else {
    if (pushers > 0) reward += kMiscoordinationPenalty;
    std::vector<std::size_t> order(actions.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t a : order) {
      const Cell target = move(state_.agents[a], actions[a]);
      if (!in_bounds(target) || on_boulder(target)) continue;
      if (std::find(state_.agents.begin(), state_.agents.end(), target) != state_.agents.end()) continue;
      state_.agents[a] = target;
    }
  }

  state_.step += 1;
  state_.done = reached || state_.step >= config_.max_steps;
  StepOutcome out = observe();
  out.reward = reward;
  out.truncated = state_.done && !reached;
  return out;
}

std::vector<std::int64_t> BoulderPush::save_state() const {
  std::vector<std::int64_t> data{state_.step, state_.done ? 1 : 0, state_.boulder.x, state_.boulder.y,
                                 static_cast<std::int64_t>(state_.heading)};
  for (Cell c : state_.agents) {
    data.push_back(c.x);
    data.push_back(c.y);
  }
  return data;
}

void BoulderPush::load_state(std::span<const std::int64_t> data) {
  const auto n = static_cast<std::size_t>(config_.n_agents);
  if (data.size() != 5 + 2 * n) throw Error("bpush: malformed state");
  BpushState s;
  s.step = static_cast<int>(data[0]);
  s.done = data[1] != 0;
  s.boulder = {static_cast<int>(data[2]), static_cast<int>(data[3])};
  s.heading = static_cast<Heading>(data[4]);
  for (std::size_t a = 0; a < n; ++a)
    s.agents.push_back({static_cast<int>(data[5 + 2 * a]), static_cast<int>(data[6 + 2 * a])});
  set_state(std::move(s));
}

}  // namespace emax::env
