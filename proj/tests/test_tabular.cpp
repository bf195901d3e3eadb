#include "emax/env/climbing.hpp"
#include "emax/rng.hpp"
#include "emax/tabular/climbing_run.hpp"
#include "emax/tabular/tabular.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace emax;
using namespace emax::tabular;

namespace {

ValueRow row(std::initializer_list<double> v) {
  ValueRow r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

template <typename F>
std::array<int, 3> histogram(int draws, F&& pick) {
  std::array<int, 3> h{};
  for (int i = 0; i < draws; ++i) h[static_cast<std::size_t>(pick())] += 1;
  return h;
}

}  // namespace

TEST_CASE("gaussian initialisation") {
  Rng rng = make_stream(0, "init");
  CHECK(init_gaussian(rng, 3, 0.0) == ValueRow::Zero(3));

  const ValueRow draws = init_gaussian(rng, 100000, 5.0);
  const double mean = draws.mean();
  const double var = (draws.array() - mean).square().sum() / static_cast<double>(draws.size() - 1);
  CHECK(var >= 24.0);
  CHECK(var <= 26.0);

  Rng a = make_stream(4, "init");
  Rng b = make_stream(4, "init");
  CHECK(init_gaussian(a, 3, 5.0) == init_gaussian(b, 3, 5.0));
  CHECK_THROWS_AS(init_gaussian(a, 3, -1.0), Error);
}

TEST_CASE("iql update") {
  ValueRow q = ValueRow::Zero(3);
  iql_update(q, 0, 11.0, 0.01);
  CHECK(q(0) == doctest::Approx(0.11));
  CHECK(q(1) == 0.0);
  CHECK(q(2) == 0.0);

  ValueRow same = row({1, 2, 3});
  iql_update(same, 1, 50.0, 0.0);
  CHECK(same == row({1, 2, 3}));

  ValueRow c = row({-4, 0, 0});
  for (int i = 0; i < 2000; ++i) iql_update(c, 0, 7.0, 0.01);
  CHECK(c(0) == doctest::Approx(7.0).epsilon(1e-6));

  ValueRow d = row({3.0, 0, 0});
  iql_update(d, 0, -30.0, 0.2);
  CHECK(std::abs(d(0) + 30.0) == doctest::Approx(0.8 * 33.0));

  CHECK_THROWS_AS(iql_update(d, 3, 1.0, 0.1), Error);
  CHECK_THROWS_AS(iql_update(d, -1, 1.0, 0.1), Error);
  CHECK_THROWS_AS(iql_update(d, 0, 1.0, 1.5), Error);
}

TEST_CASE("epsilon greedy selection") {
  Rng rng = make_stream(1, "explore");
  for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy_action(row({1, 5, 2}), 0.0, rng) == 1);

  const int n = 10000;
  const auto uniform = histogram(n, [&] { return epsilon_greedy_action(row({1, 5, 2}), 1.0, rng); });
  const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
  for (int count : uniform) CHECK(std::abs(count - n / 3.0) < 3.0 * sigma);

  const auto ties = histogram(n, [&] { return epsilon_greedy_action(row({3, 3, 1}), 0.0, rng); });
  CHECK(ties[2] == 0);
  const double half_sigma = std::sqrt(n * 0.25);
  CHECK(std::abs(ties[0] - n / 2.0) < 3.0 * half_sigma);

  CHECK(linear_epsilon(0, 1.0, 0.0, 250) == 1.0);
  CHECK(linear_epsilon(125, 1.0, 0.0, 250) == doctest::Approx(0.5));
  CHECK(linear_epsilon(250, 1.0, 0.0, 250) == 0.0);
  CHECK(linear_epsilon(10000, 1.0, 0.05, 250) == 0.05);
  CHECK_THROWS_AS(epsilon_greedy_action(row({1, 2}), 1.5, rng), Error);
}

TEST_CASE("count based ucb") {
  Rng rng = make_stream(2, "explore");
  TabularQ fresh(ValueRow::Zero(3));
  const auto first = histogram(9000, [&] { return count_ucb_action(fresh, 0.3, rng); });
  for (int count : first) CHECK(std::abs(count - 3000) < 3.0 * std::sqrt(9000 * (2.0 / 9.0)));

  TabularQ t(ValueRow::Zero(3));
  t.counts = {10, 1, 10};
  t.t = 21;
  CHECK(count_ucb_action(t, 0.3, rng) == 1);

  TabularQ visited(row({1, 4, 2}));
  visited.counts = {5, 5, 1};
  visited.t = 11;
  CHECK(count_ucb_action(visited, 0.0, rng) == 1);
  CHECK(count_ucb_action(visited, 1e-9, rng) == 1);

  TabularQ once(ValueRow::Zero(2));
  once.record(1);
  once.record(1);
  CHECK(once.t == 2);
  CHECK(once.counts == std::vector<std::int64_t>{0, 2});
  CHECK(count_ucb_action(once, 0.3, rng) == 0);
}

TEST_CASE("ensemble ucb") {
  Rng rng = make_stream(3, "explore");
  Rng init = make_stream(3, "init");
  TabularEnsembleQ ens(init, 2, 2, 0.0, 0.9);
  ens.values << 0, 0, 2, 0;
  const EnsembleStats s = ensemble_stats(ens.values);
  CHECK(s.mean(0) == 1.0);
  CHECK(s.std(0) == 1.0);
  CHECK(s.std(1) == 0.0);
  CHECK(ensemble_ucb_action(ens, 3.0, rng) == 0);

  TabularEnsembleQ same(init, 4, 3, 0.0, 0.9);
  for (Index k = 0; k < 4; ++k) same.values.row(k) = row({0.5, 2.0, -1.0});
  CHECK(ensemble_ucb_action(same, 3.0, rng) == 1);
  CHECK(ensemble_ucb_action(same, 0.0, rng) == 1);

  TabularEnsembleQ equal_spread(init, 2, 3, 0.0, 0.9);
  equal_spread.values << 1, 3, 0, 3, 5, 2;
  for (double beta : {0.1, 1.0, 10.0, 100.0}) CHECK(ensemble_ucb_action(equal_spread, beta, rng) == 1);

  TabularEnsembleQ shifted = equal_spread;
  shifted.values.array() += 40.0;
  CHECK(ensemble_ucb_action(shifted, 1.0, rng) == 1);
}

TEST_CASE("ensemble masked updates") {
  Rng init = make_stream(5, "init");
  Rng rng = make_stream(5, "update");

  TabularEnsembleQ all(init, 3, 3, 1.0, 1.0);
  for (int i = 0; i < 20; ++i) CHECK(ensemble_masked_update(all, 0, 1.0, 0.1, rng) == 3);

  TabularEnsembleQ masked(init, 4, 3, 1.0, 0.9);
  std::vector<int> hits(4, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Tensor prev = masked.values;
    ensemble_masked_update(masked, 2, i % 2 ? 100.0 : -100.0, 0.01, rng);
    for (Index k = 0; k < 4; ++k) hits[static_cast<std::size_t>(k)] += masked.values(k, 2) != prev(k, 2);
  }
  for (int h : hits) CHECK(std::abs(h / static_cast<double>(n) - 0.9) <= 0.01);
  CHECK(masked.t == n);

  TabularEnsembleQ diverse(init, 2, 3, 5.0, 0.9);
  for (int i = 0; i < 100; ++i) ensemble_masked_update(diverse, static_cast<int>(i % 3), 7.0, 0.01, rng);
  CHECK(diverse.values.row(0) != diverse.values.row(1));

  CHECK_THROWS_AS(TabularEnsembleQ(init, 3, 3, 1.0, 0.0), Error);
}

TEST_CASE("evaluation actions") {
  Rng init = make_stream(6, "init");
  Rng rng = make_stream(6, "eval");
  TabularSettings ens = TabularSettings::defaults(Variant::EnsembleUcb);
  ens.ensemble_size = 2;
  ens.init_std = 0.0;
  TabularAgent agent(ens, 2, init);
  agent.update(0, 10.0, rng);
  CHECK(agent.eval_action(rng) == 0);

  TabularSettings eps = TabularSettings::defaults(Variant::EpsilonGreedy);
  eps.init_std = 0.0;
  TabularAgent single(eps, 3, init);
  for (int i = 0; i < 50; ++i) single.update(2, 5.0, rng);
  CHECK(single.eval_action(rng) == 2);
  CHECK(single.uncertainty() == ValueRow::Zero(3));
}

TEST_CASE("tied ensemble mean breaks ties uniformly") {
  // Rows [10, 0] and [0, 10] average to [5, 5].
  Rng rng = make_stream(7, "eval");
  Tensor values(2, 2);
  values << 10, 0, 0, 10;
  const EnsembleStats s = ensemble_stats(values);
  int first = 0;
  for (int i = 0; i < 4000; ++i) first += greedy_action(s.mean, rng) == 0;
  CHECK(std::abs(first - 2000) < 3.0 * std::sqrt(1000.0));
}

TEST_CASE("greedy joint policy reward follows the payoff table") {
  env::ClimbingGame game;
  Rng rng = make_stream(8, "eval");
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      ValueRow q1 = ValueRow::Zero(3), q2 = ValueRow::Zero(3);
      q1(a) = 1.0;
      q2(b) = 1.0;
      const int joint[] = {greedy_action(q1, rng), greedy_action(q2, rng)};
      game.reset(rng);
      CHECK(game.step(joint, rng).reward == env::ClimbingGame::reward(a, b));
    }
  }
}

TEST_CASE("settings defaults and validation") {
  const auto ucb = TabularSettings::defaults(Variant::EnsembleUcb);
  CHECK(ucb.ensemble_size == 50);
  CHECK(ucb.beta == 3.0);
  CHECK(ucb.init_std == 5.0);
  CHECK(ucb.mask_p == 0.9);
  CHECK(TabularSettings::defaults(Variant::CountUcb).beta == 0.3);
  CHECK(TabularSettings::defaults(Variant::EpsilonGreedy).init_std == 10.0);
  CHECK(TabularSettings::defaults(Variant::EnsembleEpsilonGreedy).ensemble_size == 10);
  for (Variant v : {Variant::EpsilonGreedy, Variant::CountUcb, Variant::EnsembleEpsilonGreedy, Variant::EnsembleUcb})
    CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("nope"), Error);
  TabularSettings bad = ucb;
  bad.ensemble_size = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ucb;
  bad.lr = 2.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("climbing runs are reproducible and traced") {
  const auto settings = TabularSettings::defaults(Variant::EnsembleUcb);
  const ClimbingRun a = run_climbing(settings, 12, 200, 50);
  const ClimbingRun b = run_climbing(settings, 12, 200, 50);
  CHECK(a.final_actions == b.final_actions);
  CHECK(a.final_reward == b.final_reward);
  REQUIRE(a.trace.size() == b.trace.size());
  CHECK(a.trace.front().step == 0);
  CHECK(a.trace.back().step == 200);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].q_values[0] == b.trace[i].q_values[0]);
    CHECK(a.trace[i].uncertainty[1] == b.trace[i].uncertainty[1]);
  }
  CHECK(a.final_reward == env::ClimbingGame::reward(a.final_actions[0], a.final_actions[1]));
}
