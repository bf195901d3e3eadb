#pragma once

// Tiny networks, a 4-transition batch and a finite-difference gradient
// oracle for the TD losses. Shared by the unit tests and the acceptance
// binary.

#include "emax/deep/losses.hpp"
#include "emax/env/environment.hpp"
#include "emax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace emax::testing {

struct LossFixture {
  static constexpr int kAgents = 2;
  static constexpr int kObs = 3;
  static constexpr int kActions = 3;
  static constexpr int kState = kAgents * kObs;
  static constexpr int kHidden = 5;

  deep::Mixing mixing = deep::Mixing::Independent;
  bool emax = false;
  double gamma = 0.9;

  std::vector<deep::ValueNet> online;
  // Baselines: the delayed target net. EMAX: frozen copies of the members,
  // so a finite-difference probe of an online weight leaves targets fixed.
  std::vector<deep::ValueNet> target_side;
  deep::QmixMixer mixer;
  deep::QmixMixer target_mixer;
  deep::ReplayBuffer buffer;
  std::vector<deep::Batch> batches;

  LossFixture(deep::Mixing m, bool use_ensemble, int members = 3, std::uint64_t seed = 17)
      : mixing(m), emax(use_ensemble) {
    Rng rng = make_stream(seed, "fixture");
    const deep::InputLayout layout{kAgents, kObs, kActions, false};
    const int k = emax ? members : 1;
    for (int i = 0; i < k; ++i) online.emplace_back(layout.input_size(), kHidden, kActions, rng, "m" + std::to_string(i));
    if (emax) {
      target_side = online;
    } else {
      target_side.emplace_back(layout.input_size(), kHidden, kActions, rng, "target");
    }
    mixer = deep::QmixMixer(kAgents, kState, 4, 6, rng, "mixer");
    target_mixer = deep::QmixMixer(kAgents, kState, 4, 6, rng, "target_mixer");

    buffer = deep::ReplayBuffer(4, layout, kState);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < 4; ++t) {
      deep::Transition tr;
      tr.observations = Tensor(kAgents, kObs);
      tr.next_observations = Tensor(kAgents, kObs);
      for (Index i = 0; i < tr.observations.size(); ++i) {
        tr.observations.data()[i] = noise(rng);
        tr.next_observations.data()[i] = noise(rng);
      }
      tr.state = env::flatten_rows(tr.observations);
      tr.next_state = env::flatten_rows(tr.next_observations);
      tr.actions = {t % kActions, (t + 1) % kActions};
      tr.last_actions = {(t + 2) % kActions, t % kActions};
      tr.reward = noise(rng);
      tr.terminal = t == 3;
      buffer.add(tr);
    }
    // Member k trains on a shifted index set so batches differ per member.
    for (int i = 0; i < k; ++i) {
      std::vector<std::int64_t> idx;
      for (int b = 0; b < 4; ++b) idx.push_back((b + i) % 4);
      batches.push_back(buffer.make_batch(idx));
    }
  }

  deep::LossContext context() { return deep::LossContext{mixing, gamma, &mixer, &target_mixer}; }

  std::vector<ad::Parameter*> trainable() {
    std::vector<ad::Parameter*> out;
    for (auto& net : online)
      for (ad::Parameter* p : net.parameters()) out.push_back(p);
    if (mixing == deep::Mixing::Qmix)
      for (ad::Parameter* p : mixer.parameters()) out.push_back(p);
    return out;
  }

  std::vector<ad::Parameter*> target_parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& net : target_side)
      for (ad::Parameter* p : net.parameters()) out.push_back(p);
    if (mixing == deep::Mixing::Qmix)
      for (ad::Parameter* p : target_mixer.parameters()) out.push_back(p);
    return out;
  }

  double loss() {
    ad::Graph g;
    const auto terms = deep::td_loss(g, context(), online, target_side, batches);
    return g.value(terms.total)(0, 0);
  }

  /// Loss with EMAX targets taken from the live members rather than copies.
  double loss_live_targets() {
    ad::Graph g;
    std::span<deep::ValueNet> targets = emax ? std::span<deep::ValueNet>(online) : std::span<deep::ValueNet>(target_side);
    const auto terms = deep::td_loss(g, context(), online, targets, batches);
    return g.value(terms.total)(0, 0);
  }

  /// Runs backward with the given target side and leaves grads on all parameters.
  void backward(bool live_targets = false) {
    for (ad::Parameter* p : trainable()) p->zero_grad();
    for (ad::Parameter* p : target_parameters()) p->zero_grad();
    ad::Graph g;
    std::span<deep::ValueNet> targets =
        live_targets && emax ? std::span<deep::ValueNet>(online) : std::span<deep::ValueNet>(target_side);
    const auto terms = deep::td_loss(g, context(), online, targets, batches);
    g.backward(terms.total);
  }
};

struct GradientReport {
  double max_relative_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

/// Central differences on every entry of every parameter.
inline GradientReport finite_difference_check(std::vector<ad::Parameter*> params, const std::function<double()>& loss,
                                              double h = 1e-5) {
  GradientReport report;
  for (ad::Parameter* p : params) {
    for (Index i = 0; i < p->value.size(); ++i) {
      double& w = p->value.data()[i];
      const double saved = w;
      w = saved + h;
      const double up = loss();
      w = saved - h;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p->grad.data()[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
      const double rel = std::abs(numeric - analytic) / scale;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst = p->name + "[" + std::to_string(i) + "]";
      }
      report.checked += 1;
    }
  }
  return report;
}

/// A net whose outputs copy the first n_actions input columns (valid while
/// those are non-negative, since hidden layers are ReLU).
inline deep::ValueNet identity_net(int input_size, int n_actions) {
  Rng rng = make_stream(0, "identity");
  deep::ValueNet net(input_size, n_actions, n_actions, rng, "identity");
  auto p = net.parameters();
  p[0]->value = Tensor::Zero(input_size, n_actions);
  p[0]->value.topRows(n_actions).setIdentity();
  for (int l : {2, 4}) p[static_cast<std::size_t>(l)]->value = Tensor::Identity(n_actions, n_actions);
  for (int l : {1, 3, 5}) p[static_cast<std::size_t>(l)]->value.setZero();
  return net;
}

/// A net that outputs `values` for every input.
inline deep::ValueNet constant_net(int input_size, const std::vector<double>& values, const std::string& name = "c") {
  Rng rng = make_stream(0, "constant");
  const int n = static_cast<int>(values.size());
  deep::ValueNet net(input_size, 4, n, rng, name);
  auto p = net.parameters();
  p[4]->value.setZero();
  for (int a = 0; a < n; ++a) p[5]->value(0, a) = values[static_cast<std::size_t>(a)];
  return net;
}

/// Recovers the VDN bootstrap value from the library loss on one transition
/// (identity nets, r = 0, gamma = 1) and compares it with a brute-force max of
/// the summed values over every joint action. Returns the absolute gap.
inline double vdn_joint_max_gap(int n_agents, int n_actions, Rng& rng) {
  const deep::InputLayout layout{n_agents, n_actions, n_actions, false};
  std::uniform_real_distribution<double> now(0.0, 1.0), next(5.0, 10.0);
  deep::Transition tr;
  tr.observations = Tensor(n_agents, n_actions);
  tr.next_observations = Tensor(n_agents, n_actions);
  for (Index i = 0; i < tr.observations.size(); ++i) {
    tr.observations.data()[i] = now(rng);
    tr.next_observations.data()[i] = next(rng);
  }
  tr.state = RowVectorX<double>::Zero(1);
  tr.next_state = tr.state;
  double q_tot = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    Index a = 0;
    q_tot += tr.observations.row(i).minCoeff(&a);
    tr.actions.push_back(static_cast<int>(a));
  }
  tr.last_actions.assign(static_cast<std::size_t>(n_agents), 0);
  deep::ReplayBuffer buffer(1, layout, 1);
  buffer.add(tr);
  const std::int64_t index = 0;
  const std::vector<deep::Batch> batch{buffer.make_batch(std::span<const std::int64_t>(&index, 1))};

  std::vector<deep::ValueNet> nets{identity_net(layout.input_size(), n_actions)};
  ad::Graph g;
  const auto terms = deep::td_loss(g, deep::LossContext{deep::Mixing::Vdn, 1.0, nullptr, nullptr}, nets, nets, batch);
  const double target = q_tot + std::sqrt(g.value(terms.total)(0, 0));

  double joint_max = -std::numeric_limits<double>::infinity();
  std::vector<int> joint(static_cast<std::size_t>(n_agents), 0);
  while (true) {
    double total = 0.0;
    for (int i = 0; i < n_agents; ++i) total += tr.next_observations(i, joint[static_cast<std::size_t>(i)]);
    joint_max = std::max(joint_max, total);
    int i = 0;
    while (i < n_agents && ++joint[static_cast<std::size_t>(i)] == n_actions) joint[static_cast<std::size_t>(i++)] = 0;
    if (i == n_agents) break;
  }
  return std::abs(target - joint_max);
}

inline GradientReport check_loss_gradients(deep::Mixing mixing, bool emax) {
  LossFixture f(mixing, emax);
  f.backward();
  return finite_difference_check(f.trainable(), [&] { return f.loss(); });
}

}  // namespace emax::testing
