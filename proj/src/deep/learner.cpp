#include "emax/deep/learner.hpp"

#include "emax/deep/ensemble.hpp"
#include "emax/rng.hpp"

namespace emax::deep {

void LearnerConfig::validate() const {
  if (emax && ensemble_size < 2) throw Error("ensemble_size must be >= 2 for emax algorithms");
  if (beta < 0.0) throw Error("beta must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  if (!(lr > 0.0)) throw Error("lr must be positive");
  if (!(max_grad_norm > 0.0)) throw Error("max_grad_norm must be positive");
  if (hidden_size < 1) throw Error("hidden_size must be positive");
  if (batch_size < 1) throw Error("batch_size must be positive");
  if (target_interval < 1) throw Error("target_interval must be positive");
  if (mixer_embed < 1 || hypernet_embed < 1) throw Error("mixer sizes must be positive");
  if (epsilon.decay_steps < 0) throw Error("epsilon_decay_steps must be >= 0");
  for (double e : {epsilon.start, epsilon.final, epsilon.evaluation})
    if (!(e >= 0.0 && e <= 1.0)) throw Error("epsilon values must lie in [0, 1]");
}

Learner::Learner(const LearnerConfig& config, const env::EnvSpec& spec, std::uint64_t seed) : config_(config) {
  config_.validate();
  for (int i = 1; i < spec.n_agents; ++i)
    if (spec.n_actions[static_cast<std::size_t>(i)] != spec.n_actions[0] ||
        spec.obs_size[static_cast<std::size_t>(i)] != spec.obs_size[0])
      throw Error("Learner: parameter sharing needs identical action and observation spaces");
  layout_ = InputLayout{spec.n_agents, spec.obs_size[0], spec.n_actions[0], config_.agent_id_input};

  const int k = config_.members();
  members_.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) {
    Rng init = make_stream(seed, "init/member/" + std::to_string(m));
    members_.emplace_back(layout_.input_size(), config_.hidden_size, layout_.n_actions, init,
                          "member" + std::to_string(m));
  }
  if (!config_.emax) {
    target_ = members_.front();
    for (ad::Parameter* p : target_.parameters()) p->name = "target/" + p->name;
  }
  if (config_.mixing == Mixing::Qmix) {
    Rng init = make_stream(seed, "init/mixer");
    mixer_ = QmixMixer(spec.n_agents, spec.state_size, config_.mixer_embed, config_.hypernet_embed, init, "mixer");
    target_mixer_ = mixer_;
    for (ad::Parameter* p : target_mixer_.parameters()) p->name = "target/" + p->name;
  }
  const auto params = trainable();
  adam_ = ad::AdamState(ad::AdamConfig{config_.lr, 0.9, 0.999, 1e-8}, params);
}

std::vector<Tensor> Learner::member_values(const Tensor& inputs) const {
  std::vector<Tensor> out;
  out.reserve(members_.size());
  for (const ValueNet& net : members_) out.push_back(net.forward(inputs));
  return out;
}

std::vector<int> Learner::act_training(const Tensor& observations, std::span<const int> last_actions, std::int64_t t,
                                       Rng& rng) const {
  const Tensor inputs = agent_inputs(layout_, observations, last_actions);
  std::vector<int> actions(static_cast<std::size_t>(layout_.n_agents));
  if (config_.emax) {
    const EnsembleValues stats = ensemble_stats(member_values(inputs));
    for (int i = 0; i < layout_.n_agents; ++i)
      actions[static_cast<std::size_t>(i)] = ucb_action(stats.mean.row(i), stats.std.row(i), config_.beta, rng);
    return actions;
  }
  const double eps = config_.epsilon.value(t);
  const Tensor q = members_.front().forward(inputs);
  for (int i = 0; i < layout_.n_agents; ++i) {
    if (bernoulli(rng, eps))
      actions[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(layout_.n_actions)));
    else
      actions[static_cast<std::size_t>(i)] = static_cast<int>(argmax_random_tie(q.row(i), rng));
  }
  return actions;
}

std::vector<int> Learner::act_evaluation(const Tensor& observations, std::span<const int> last_actions, Rng& rng,
                                         std::optional<int> single_member) const {
  if (single_member && (*single_member < 0 || *single_member >= members()))
    throw Error("act_evaluation: member index out of range");
  const Tensor inputs = agent_inputs(layout_, observations, last_actions);
  const bool vote = config_.emax && !single_member;
  std::vector<Tensor> values;
  if (vote) values = member_values(inputs);
  else values.push_back(members_[static_cast<std::size_t>(single_member.value_or(0))].forward(inputs));

  std::vector<int> actions(static_cast<std::size_t>(layout_.n_agents));
  for (int i = 0; i < layout_.n_agents; ++i) {
    int a;
    if (bernoulli(rng, config_.epsilon.evaluation)) {
      a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(layout_.n_actions)));
    } else if (vote) {
      std::vector<RowVectorX<double>> rows;
      for (const Tensor& q : values) rows.emplace_back(q.row(i));
      a = majority_vote_action(rows, rng);
    } else {
      a = static_cast<int>(argmax_random_tie(values.front().row(i), rng));
    }
    actions[static_cast<std::size_t>(i)] = a;
  }
  return actions;
}

std::vector<ad::Parameter*> Learner::trainable() {
  std::vector<ad::Parameter*> out;
  for (ValueNet& net : members_)
    for (ad::Parameter* p : net.parameters()) out.push_back(p);
  if (config_.mixing == Mixing::Qmix)
    for (ad::Parameter* p : mixer_.parameters()) out.push_back(p);
  return out;
}

std::vector<ad::Parameter*> Learner::all_parameters() {
  std::vector<ad::Parameter*> out = trainable();
  if (!config_.emax)
    for (ad::Parameter* p : target_.parameters()) out.push_back(p);
  if (config_.mixing == Mixing::Qmix)
    for (ad::Parameter* p : target_mixer_.parameters()) out.push_back(p);
  return out;
}

UpdateStats Learner::update(const ReplayBuffer& buffer, Rng& rng, const RewardStandardizer* rewards) {
  std::vector<Batch> batches = config_.emax
                                   ? sample_bootstrapped_batches(buffer, config_.ensemble_size, config_.batch_size, rng)
                                   : std::vector<Batch>{buffer.sample(config_.batch_size, rng)};
  if (rewards)
    for (Batch& b : batches) b.rewards = b.rewards.unaryExpr([rewards](double r) { return rewards->apply(r); });
  LossContext ctx{config_.mixing, config_.gamma, &mixer_, &target_mixer_};
  std::span<ValueNet> online(members_);
  std::span<ValueNet> target_side = config_.emax ? online : std::span<ValueNet>(&target_, 1);

  const std::vector<ad::Parameter*> params = trainable();
  for (ad::Parameter* p : params) p->zero_grad();
  ad::Graph graph;
  const LossTerms terms = td_loss(graph, ctx, online, target_side, batches);
  graph.backward(terms.total);

  UpdateStats stats;
  stats.loss = graph.value(terms.total)(0, 0);
  stats.raw_grad_norm = ad::clip_global_norm(params, config_.max_grad_norm);
  stats.grad_norm = std::min(stats.raw_grad_norm, config_.max_grad_norm);
  ad::adam_step(params, adam_);

  update_count_ += 1;
  if (!config_.emax) target_sync(members_.front(), target_, config_.target_interval, update_count_);
  if (config_.mixing == Mixing::Qmix) target_sync(mixer_, target_mixer_, config_.target_interval, update_count_);
  return stats;
}

}  // namespace emax::deep
