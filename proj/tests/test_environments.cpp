#include "emax/env/factory.hpp"
#include "emax/rng.hpp"

#include <doctest.h>

#include <set>

using namespace emax;
using namespace emax::env;

namespace {

std::vector<StepOutcome> replay_actions(Environment& env, std::uint64_t seed, int steps) {
  Rng rng = make_stream(seed, "env");
  Rng act = make_stream(seed, "actions");
  std::vector<StepOutcome> out{env.reset(rng)};
  for (int t = 0; t < steps && !out.back().done; ++t) {
    std::vector<int> a;
    for (int n : env.spec().n_actions) a.push_back(static_cast<int>(uniform_index(act, static_cast<std::size_t>(n))));
    out.push_back(env.step(a, rng));
  }
  return out;
}

bool same(const StepOutcome& a, const StepOutcome& b) {
  return a.observations == b.observations && a.reward == b.reward && a.done == b.done && a.state == b.state &&
         a.truncated == b.truncated;
}

LbfState two_agents_around_food(int level0, int level1, int food_level) {
  LbfState s;
  s.agents = {{1, 2}, {3, 2}};
  s.agent_levels = {level0, level1};
  s.foods = {{2, 2}};
  s.food_levels = {food_level};
  s.collected = {false};
  return s;
}

}  // namespace

TEST_CASE("climbing game matches the payoff table for all joint actions") {
  ClimbingGame game;
  Rng rng = make_stream(0, "c");
  const double expected[3][3] = {{11, -30, 0}, {-30, 7, 6}, {0, 0, 5}};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const StepOutcome start = game.reset(rng);
      CHECK(start.observations == Tensor::Ones(2, 1));
      const int joint[] = {a, b};
      const StepOutcome out = game.step(joint, rng);
      CHECK(out.reward == expected[a][b]);
      CHECK(out.done);
      CHECK_FALSE(out.truncated);
    }
  }
  const int bad[] = {0, 3};
  game.reset(rng);
  CHECK_THROWS_AS(game.step(bad, rng), Error);
  const int ok[] = {0, 0};
  game.step(ok, rng);
  CHECK_THROWS_AS(game.step(ok, rng), Error);
}

TEST_CASE("lbf reset is seeded, non-overlapping and sized by the encoding") {
  LevelBasedForaging env(LbfConfig{});
  Rng r1 = make_stream(7, "env");
  Rng r2 = make_stream(7, "env");
  const StepOutcome a = env.reset(r1);
  const LbfState first = env.state();
  const StepOutcome b = env.reset(r2);
  CHECK(same(a, b));
  CHECK(first.agents == env.state().agents);
  CHECK(a.observations.rows() == 2);
  CHECK(a.observations.cols() == (2 + 1) * 3);
  CHECK(env.spec().state_size == 2 * 9);

  LevelBasedForaging big(LbfConfig{8, 8, 3, 3, false, 0.0, 50, 3});
  Rng rng = make_stream(11, "env");
  for (int trial = 0; trial < 200; ++trial) {
    big.reset(rng);
    std::set<std::pair<int, int>> cells;
    for (Cell c : big.state().agents) cells.insert({c.x, c.y});
    for (Cell c : big.state().foods) cells.insert({c.x, c.y});
    CHECK(cells.size() == 6);
    for (int level : big.state().agent_levels) CHECK((level >= 1 && level <= 3));
  }
}

TEST_CASE("lbf coop food levels need at least two agents") {
  int ones[] = {1, 1};
  CHECK(LevelBasedForaging::coop_level_range(ones) == std::pair{2, 2});
  int mixed[] = {3, 1, 2};
  CHECK(LevelBasedForaging::coop_level_range(mixed) == std::pair{4, 5});

  LevelBasedForaging env(LbfConfig{5, 5, 2, 1, true, 0.05, 50, 1});
  Rng rng = make_stream(3, "env");
  for (int trial = 0; trial < 50; ++trial) {
    env.reset(rng);
    CHECK(env.state().food_levels[0] == 2);
  }
  LevelBasedForaging wide(LbfConfig{});
  for (int trial = 0; trial < 200; ++trial) {
    wide.reset(rng);
    const auto& lv = wide.state().agent_levels;
    const int food = wide.state().food_levels[0];
    CHECK(food > std::max(lv[0], lv[1]));
    CHECK(food <= lv[0] + lv[1]);
  }
}

TEST_CASE("lbf observation encoding") {
  LevelBasedForaging env(LbfConfig{});
  env.set_state(two_agents_around_food(1, 2, 3));
  const StepOutcome o = env.observe();
  const double row0[] = {1, 2, 1, 3, 2, 2, 2, 2, 3};
  const double row1[] = {3, 2, 2, 1, 2, 1, 2, 2, 3};
  for (int j = 0; j < 9; ++j) {
    CHECK(o.observations(0, j) == row0[j]);
    CHECK(o.observations(1, j) == row1[j]);
  }
  CHECK(o.state.size() == 18);
  CHECK(o.state(9) == 3.0);
}

TEST_CASE("lbf cooperative pickup, penalty and noop") {
  LevelBasedForaging env(LbfConfig{});
  Rng rng = make_stream(0, "env");

  SUBCASE("two level-1 agents lift a level-2 food") {
    env.set_state(two_agents_around_food(1, 1, 2));
    const int both[] = {LevelBasedForaging::Pickup, LevelBasedForaging::Pickup};
    const StepOutcome out = env.step(both, rng);
    CHECK(out.reward == doctest::Approx(2.0 / 2.0));
    CHECK(env.state().collected[0]);
    CHECK(out.done);
    CHECK_FALSE(out.truncated);
    CHECK(out.observations(0, 6) == -1.0);
    CHECK(out.observations(0, 8) == 0.0);
  }
  SUBCASE("a lone level-1 agent fails and pays the penalty") {
    env.set_state(two_agents_around_food(1, 1, 2));
    const int one[] = {LevelBasedForaging::Pickup, LevelBasedForaging::Noop};
    const StepOutcome out = env.step(one, rng);
    CHECK(out.reward == doctest::Approx(-0.05));
    CHECK_FALSE(env.state().collected[0]);
    CHECK_FALSE(out.done);
  }
  SUBCASE("failed pickups by several agents add up") {
    env.set_state(two_agents_around_food(1, 1, 3));
    const int both[] = {LevelBasedForaging::Pickup, LevelBasedForaging::Pickup};
    CHECK(env.step(both, rng).reward == doctest::Approx(-0.1));
  }
  SUBCASE("all noop changes nothing") {
    env.set_state(two_agents_around_food(1, 1, 2));
    const std::vector<std::int64_t> before = env.save_state();
    const int noop[] = {LevelBasedForaging::Noop, LevelBasedForaging::Noop};
    const StepOutcome out = env.step(noop, rng);
    CHECK(out.reward == 0.0);
    std::vector<std::int64_t> after = env.save_state();
    after[0] -= 1;  // step counter
    CHECK(after == before);
  }
  SUBCASE("movement is blocked by food, agents and walls") {
    LbfState s = two_agents_around_food(1, 1, 2);
    s.agents = {{1, 2}, {0, 2}};
    env.set_state(s);
    const int moves[] = {LevelBasedForaging::Right, LevelBasedForaging::Right};
    env.step(moves, rng);
    CHECK(env.state().agents[0] == Cell{1, 2});
    CHECK(env.state().agents[1] == Cell{0, 2});
    const int walls[] = {LevelBasedForaging::Up, LevelBasedForaging::Left};
    env.step(walls, rng);
    CHECK(env.state().agents[0] == Cell{1, 1});
    CHECK(env.state().agents[1] == Cell{0, 2});
  }
  SUBCASE("invalid actions and steps after the end are errors") {
    env.set_state(two_agents_around_food(1, 1, 2));
    const int bad[] = {6, 0};
    CHECK_THROWS_AS(env.step(bad, rng), Error);
    const int both[] = {LevelBasedForaging::Pickup, LevelBasedForaging::Pickup};
    env.step(both, rng);
    CHECK_THROWS_AS(env.step(both, rng), Error);
  }
}

TEST_CASE("lbf full clear returns exactly one whatever the food levels") {
  LevelBasedForaging env(LbfConfig{7, 7, 2, 2, false, 0.0, 50, 3});
  Rng rng = make_stream(0, "env");
  LbfState s;
  s.agents = {{1, 1}, {5, 5}};
  s.agent_levels = {3, 3};
  s.foods = {{2, 1}, {5, 4}};
  s.food_levels = {3, 1};
  s.collected = {false, false};
  env.set_state(s);
  const int first[] = {LevelBasedForaging::Pickup, LevelBasedForaging::Noop};
  const int second[] = {LevelBasedForaging::Noop, LevelBasedForaging::Pickup};
  double total = env.step(first, rng).reward;
  const StepOutcome last = env.step(second, rng);
  total += last.reward;
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(last.done);
}

TEST_CASE("lbf episodes end at the step limit as truncation") {
  LevelBasedForaging env(LbfConfig{5, 5, 2, 1, true, 0.0, 5, 3});
  Rng rng = make_stream(1, "env");
  env.reset(rng);
  const int noop[] = {0, 0};
  StepOutcome out;
  for (int t = 0; t < 5; ++t) out = env.step(noop, rng);
  CHECK(out.done);
  CHECK(out.truncated);
}

TEST_CASE("bpush reset layout and encoding") {
  BoulderPush env(BpushConfig{});
  Rng r1 = make_stream(5, "env");
  Rng r2 = make_stream(5, "env");
  CHECK(same(env.reset(r1), env.reset(r2)));
  Rng rng = make_stream(6, "env");
  std::set<int> headings;
  for (int trial = 0; trial < 200; ++trial) {
    const StepOutcome o = env.reset(rng);
    CHECK(o.observations.cols() == 2 + 2 * 2 + 4);
    CHECK(o.observations.rightCols(4).row(0).sum() == 1.0);
    CHECK(o.observations.row(0) == o.observations.row(1));
    headings.insert(static_cast<int>(env.state().heading));
    const auto cells = env.boulder_cells();
    for (Cell a : env.state().agents) CHECK(std::find(cells.begin(), cells.end(), a) == cells.end());
    CHECK(env.distance_to_goal() >= 1);
  }
  CHECK(headings.size() == 4);
}

TEST_CASE("bpush pushing rules") {
  BoulderPush env(BpushConfig{});
  Rng rng = make_stream(0, "env");
  BpushState s;
  s.heading = Heading::North;
  s.boulder = {3, 4};
  s.agents = {{3, 5}, {4, 5}};
  env.set_state(s);

  SUBCASE("all agents push together") {
    const int push[] = {BoulderPush::Up, BoulderPush::Up};
    const StepOutcome out = env.step(push, rng);
    CHECK(out.reward == doctest::Approx(0.2));
    CHECK(env.state().boulder == Cell{3, 3});
    CHECK(env.state().agents[0] == Cell{3, 4});
  }
  SUBCASE("one pusher is penalised and nothing moves forward") {
    const int half[] = {BoulderPush::Up, BoulderPush::Down};
    const StepOutcome out = env.step(half, rng);
    CHECK(out.reward == doctest::Approx(-0.01));
    CHECK(env.state().boulder == Cell{3, 4});
    CHECK(env.state().agents[0] == Cell{3, 5});
    CHECK(env.state().agents[1] == Cell{4, 6});
  }
  SUBCASE("reaching the edge pays one per agent and ends the episode") {
    s.boulder = {3, 1};
    s.agents = {{3, 2}, {4, 2}};
    env.set_state(s);
    const int push[] = {BoulderPush::Up, BoulderPush::Up};
    const StepOutcome out = env.step(push, rng);
    CHECK(out.reward == doctest::Approx(0.2 + 2.0));
    CHECK(out.done);
    CHECK_FALSE(out.truncated);
    CHECK_THROWS_AS(env.step(push, rng), Error);
  }
}

TEST_CASE("bpush scripted pushing attains the maximum return") {
  BpushConfig cfg;
  for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
    BoulderPush env(cfg);
    Rng rng = make_stream(0, "env");
    BpushState s;
    s.heading = h;
    s.boulder = (h == Heading::North || h == Heading::South) ? Cell{2, 4} : Cell{4, 2};
    s.agents = {{0, 0}, {7, 7}};
    env.set_state(s);
    s.agents = env.push_slots();
    env.set_state(s);
    const int d = env.distance_to_goal();
    double ret = 0.0;
    StepOutcome out;
    while (!out.done) {
      const std::vector<int> a(2, env.push_action());
      out = env.step(a, rng);
      ret += out.reward;
    }
    CHECK(ret == doctest::Approx(0.1 * 2 * d + 1.0 * 2));
  }
}

TEST_CASE("seeded action sequences replay identically") {
  for (const EnvConfig& cfg : {EnvConfig{LbfConfig{}}, EnvConfig{BpushConfig{}}, EnvConfig{ClimbingConfig{}}}) {
    auto e1 = make_environment(cfg);
    auto e2 = make_environment(cfg);
    const auto a = replay_actions(*e1, 9, 60);
    const auto b = replay_actions(*e2, 9, 60);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same(a[i], b[i]));
    for (const StepOutcome& o : a) CHECK(o.observations.cols() == e1->spec().obs_size[0]);
  }
}

TEST_CASE("save and load state round-trips mid-episode") {
  for (const EnvConfig& cfg : {EnvConfig{LbfConfig{}}, EnvConfig{BpushConfig{}}}) {
    auto env = make_environment(cfg);
    Rng rng = make_stream(2, "env");
    env->reset(rng);
    std::vector<int> a(2, 1);
    env->step(a, rng);
    const auto saved = env->save_state();
    const StepOutcome before = env->observe();
    auto other = make_environment(cfg);
    other->load_state(saved);
    CHECK(same(other->observe(), before));
    Rng r1 = rng, r2 = rng;
    CHECK(same(env->step(a, r1), other->step(a, r2)));
  }
}
