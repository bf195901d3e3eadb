#include "emax/tabular/tabular.hpp"

#include "emax/rng.hpp"

#include <algorithm>
#include <limits>

namespace emax::tabular {

ValueRow init_gaussian(Rng& rng, int n_actions, double std) {
  if (std < 0.0) throw Error("init_gaussian: std must be >= 0");
  ValueRow row(n_actions);
  for (Index a = 0; a < n_actions; ++a) row(a) = normal(rng, 0.0, std);
  return row;
}

void iql_update(ValueRow& row, int action, double reward, double lr) {
  if (action < 0 || action >= row.size()) throw Error("iql_update: invalid action " + std::to_string(action));
  if (lr < 0.0 || lr > 1.0) throw Error("iql_update: learning rate outside [0, 1]");
  row(action) += lr * (reward - row(action));
}

double linear_epsilon(std::int64_t t, double start, double final, std::int64_t decay_steps) {
  if (decay_steps <= 0 || t >= decay_steps) return final;
  const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
  return start + (final - start) * frac;
}

int greedy_action(const ValueRow& row, Rng& rng) { return static_cast<int>(argmax_random_tie(row, rng)); }

int epsilon_greedy_action(const ValueRow& row, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw Error("epsilon_greedy_action: epsilon outside [0, 1]");
  if (epsilon > 0.0 && uniform01(rng) < epsilon) return static_cast<int>(uniform_index(rng, static_cast<std::size_t>(row.size())));
  return greedy_action(row, rng);
}

TabularQ::TabularQ(ValueRow initial) : values(std::move(initial)), counts(static_cast<std::size_t>(values.size()), 0) {}

void TabularQ::record(int action) {
  counts.at(static_cast<std::size_t>(action)) += 1;
  t += 1;
}

int count_ucb_action(const TabularQ& table, double beta, Rng& rng) {
  if (beta < 0.0) throw Error("count_ucb_action: beta must be >= 0");
  ValueRow score(table.values.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < score.size(); ++a) {
    const auto n = table.counts[static_cast<std::size_t>(a)];
    score(a) = n == 0 ? inf : table.values(a) + beta * static_cast<double>(table.t) / static_cast<double>(n);
  }
  return static_cast<int>(argmax_random_tie(score, rng));
}

TabularEnsembleQ::TabularEnsembleQ(Rng& rng, int members, int n_actions, double init_std, double p)
    : values(members, n_actions), mask_p(p) {
  if (members < 1) throw Error("TabularEnsembleQ: needs at least one member");
  if (!(p > 0.0 && p <= 1.0)) throw Error("TabularEnsembleQ: mask probability outside (0, 1]");
  for (Index k = 0; k < members; ++k) values.row(k) = init_gaussian(rng, n_actions, init_std);
}

EnsembleStats ensemble_stats(const Tensor& member_values) {
  EnsembleStats s;
  s.mean = member_values.colwise().mean();
  const Tensor centred = member_values.rowwise() - s.mean;
  s.std = (centred.array().square().colwise().sum() / static_cast<double>(member_values.rows())).sqrt().matrix();
  return s;
}

int ensemble_ucb_action(const TabularEnsembleQ& ens, double beta, Rng& rng) {
  if (beta < 0.0) throw Error("ensemble_ucb_action: beta must be >= 0");
  const EnsembleStats s = ensemble_stats(ens.values);
  const ValueRow score = s.mean + beta * s.std;
  return static_cast<int>(argmax_random_tie(score, rng));
}

int ensemble_masked_update(TabularEnsembleQ& ens, int action, double reward, double lr, Rng& rng) {
  int updated = 0;
  for (Index k = 0; k < ens.values.rows(); ++k) {
    if (!bernoulli(rng, ens.mask_p)) continue;
    ValueRow row = ens.values.row(k);
    iql_update(row, action, reward, lr);
    ens.values.row(k) = row;
    ++updated;
  }
  ens.t += 1;
  return updated;
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::EpsilonGreedy: return "iql_eps";
    case Variant::CountUcb: return "iql_ucb";
    case Variant::EnsembleEpsilonGreedy: return "ens_iql_eps";
    case Variant::EnsembleUcb: return "ens_iql_ucb";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::EpsilonGreedy, Variant::CountUcb, Variant::EnsembleEpsilonGreedy, Variant::EnsembleUcb})
    if (variant_name(v) == name) return v;
  throw Error("unknown tabular variant '" + name + "'");
}

TabularSettings TabularSettings::defaults(Variant v) {
  TabularSettings s;
  s.variant = v;
  s.lr = 0.01;
  switch (v) {
    case Variant::EpsilonGreedy:
      s.init_std = 10.0;
      s.ensemble_size = 1;
      s.epsilon_decay_steps = 250;
      s.epsilon_final = 0.0;
      break;
    case Variant::CountUcb:
      s.init_std = 5.0;
      s.ensemble_size = 1;
      s.beta = 0.3;
      break;
    case Variant::EnsembleEpsilonGreedy:
      s.init_std = 1.0;
      s.ensemble_size = 10;
      s.mask_p = 0.9;
      s.epsilon_decay_steps = 250;
      s.epsilon_final = 0.0;
      break;
    case Variant::EnsembleUcb:
      s.init_std = 5.0;
      s.ensemble_size = 50;
      s.mask_p = 0.9;
      s.beta = 3.0;
      break;
  }
  return s;
}

void TabularSettings::validate() const {
  if (lr < 0.0 || lr > 1.0) throw Error("lr must lie in [0, 1]");
  if (init_std < 0.0) throw Error("init_std must be >= 0");
  if (beta < 0.0) throw Error("beta must be >= 0");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_final < 0.0 || epsilon_final > 1.0)
    throw Error("epsilon values must lie in [0, 1]");
  if (epsilon_decay_steps < 0) throw Error("epsilon_decay_steps must be >= 0");
  const bool ensemble = variant == Variant::EnsembleEpsilonGreedy || variant == Variant::EnsembleUcb;
  if (ensemble && ensemble_size < 2) throw Error("ensemble_size must be >= 2 for ensemble variants");
  if (ensemble && !(mask_p > 0.0 && mask_p <= 1.0)) throw Error("bernoulli_p must lie in (0, 1]");
}

namespace {

bool is_ensemble(Variant v) { return v == Variant::EnsembleEpsilonGreedy || v == Variant::EnsembleUcb; }

}  // namespace

TabularAgent::TabularAgent(const TabularSettings& settings, int n_actions, Rng& init_rng)
    : settings_(settings),
      single_(is_ensemble(settings.variant) ? ValueRow::Zero(n_actions) : init_gaussian(init_rng, n_actions, settings.init_std)),
      ensemble_(init_rng, is_ensemble(settings.variant) ? settings.ensemble_size : 1,
                is_ensemble(settings.variant) ? n_actions : 0, settings.init_std, is_ensemble(settings.variant) ? settings.mask_p : 1.0) {
  settings_.validate();
}

int TabularAgent::act(std::int64_t t, Rng& rng) const {
  switch (settings_.variant) {
    case Variant::EpsilonGreedy:
      return epsilon_greedy_action(
          single_.values, linear_epsilon(t, settings_.epsilon_start, settings_.epsilon_final, settings_.epsilon_decay_steps), rng);
    case Variant::CountUcb:
      return count_ucb_action(single_, settings_.beta, rng);
    case Variant::EnsembleEpsilonGreedy:
      return epsilon_greedy_action(
          ensemble_stats(ensemble_.values).mean,
          linear_epsilon(t, settings_.epsilon_start, settings_.epsilon_final, settings_.epsilon_decay_steps), rng);
    case Variant::EnsembleUcb:
      return ensemble_ucb_action(ensemble_, settings_.beta, rng);
  }
  return 0;
}

void TabularAgent::update(int action, double reward, Rng& rng) {
  if (is_ensemble(settings_.variant)) {
    ensemble_masked_update(ensemble_, action, reward, settings_.lr, rng);
  } else {
    iql_update(single_.values, action, reward, settings_.lr);
    single_.record(action);
  }
}

int TabularAgent::eval_action(Rng& rng) const { return greedy_action(q_values(), rng); }

ValueRow TabularAgent::q_values() const {
  return is_ensemble(settings_.variant) ? ensemble_stats(ensemble_.values).mean : single_.values;
}

ValueRow TabularAgent::uncertainty() const {
  switch (settings_.variant) {
    case Variant::EnsembleEpsilonGreedy:
    case Variant::EnsembleUcb:
      return ensemble_stats(ensemble_.values).std;
    case Variant::CountUcb: {
      ValueRow u(single_.values.size());
      for (Index a = 0; a < u.size(); ++a) {
        const auto n = single_.counts[static_cast<std::size_t>(a)];
        u(a) = n == 0 ? std::numeric_limits<double>::infinity()
                      : settings_.beta * static_cast<double>(single_.t) / static_cast<double>(n);
      }
      return u;
    }
    case Variant::EpsilonGreedy:
      break;
  }
  return ValueRow::Zero(single_.values.size());
}

}  // namespace emax::tabular
