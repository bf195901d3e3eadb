#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emax::tabular {

using ValueRow = RowVectorX<double>;

/// Entries drawn i.i.d. from N(0, std^2).
ValueRow init_gaussian(Rng& rng, int n_actions, double std);

/// Q(a) <- Q(a) + lr * (reward - Q(a)). Stateless games regress straight to
/// the immediate reward.
void iql_update(ValueRow& row, int action, double reward, double lr);

/// Linear decay from `start` to `final` over `decay_steps`, then constant.
double linear_epsilon(std::int64_t t, double start, double final, std::int64_t decay_steps);

int greedy_action(const ValueRow& row, Rng& rng);
int epsilon_greedy_action(const ValueRow& row, double epsilon, Rng& rng);

struct TabularQ {
  ValueRow values;
  std::vector<std::int64_t> counts;
  std::int64_t t = 0;

  explicit TabularQ(ValueRow initial);
  void record(int action);
};

/// argmax Q(a) + beta * t / N(a); unvisited actions are taken first.
int count_ucb_action(const TabularQ& table, double beta, Rng& rng);

struct TabularEnsembleQ {
  /// K x A, one value row per member.
  Tensor values;
  double mask_p = 0.9;
  std::int64_t t = 0;

  TabularEnsembleQ(Rng& rng, int members, int n_actions, double init_std, double mask_p);
  int size() const { return static_cast<int>(values.rows()); }
};

struct EnsembleStats {
  ValueRow mean;
  /// Population standard deviation (divisor K).
  ValueRow std;
};

EnsembleStats ensemble_stats(const Tensor& member_values);

int ensemble_ucb_action(const TabularEnsembleQ& ens, double beta, Rng& rng);

/// Each member takes the IQL update independently with probability mask_p.
/// Returns how many members were updated.
int ensemble_masked_update(TabularEnsembleQ& ens, int action, double reward, double lr, Rng& rng);

enum class Variant { EpsilonGreedy, CountUcb, EnsembleEpsilonGreedy, EnsembleUcb };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct TabularSettings {
  Variant variant = Variant::EnsembleUcb;
  double lr = 0.01;
  double init_std = 5.0;
  int ensemble_size = 50;
  double mask_p = 0.9;
  double beta = 3.0;
  double epsilon_start = 1.0;
  double epsilon_final = 0.0;
  std::int64_t epsilon_decay_steps = 250;

  /// Best grid-search configuration for each variant.
  static TabularSettings defaults(Variant v);
  void validate() const;
};

/// One independent learner over a single-state action space.
class TabularAgent {
 public:
  TabularAgent(const TabularSettings& settings, int n_actions, Rng& init_rng);

  int act(std::int64_t t, Rng& rng) const;
  void update(int action, double reward, Rng& rng);
  /// Greedy on Q, or on the ensemble mean.
  int eval_action(Rng& rng) const;

  /// Point estimate per action (ensemble mean for ensembles).
  ValueRow q_values() const;
  /// Exploration uncertainty per action: ensemble std, or the count bonus
  /// t / N(a) for count-UCB; zero for epsilon-greedy learners.
  ValueRow uncertainty() const;

  const TabularSettings& settings() const { return settings_; }

 private:
  TabularSettings settings_;
  TabularQ single_;
  TabularEnsembleQ ensemble_;
};

}  // namespace emax::tabular
