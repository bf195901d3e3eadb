#include "emax/harness/experiment.hpp"

#include "emax/rng.hpp"
#include "emax/tabular/climbing_run.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>

namespace emax::harness {

namespace {

const char* kActionNames[] = {"A", "B", "C"};

}  // namespace

double evaluate_policy(env::Environment& env, const Policy& policy, int episodes, Rng& rng) {
  if (episodes < 1) throw Error("evaluate_policy: episodes must be >= 1");
  const auto n = static_cast<std::size_t>(env.spec().n_agents);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env::StepOutcome out = env.reset(rng);
    std::vector<int> last(n, 0);
    while (!out.done) {
      std::vector<int> actions = policy(out.observations, last, rng);
      out = env.step(actions, rng);
      total += out.reward;
      last = std::move(actions);
    }
  }
  return total / episodes;
}

double evaluate_policy(env::Environment& env, const deep::Learner& learner, int episodes, Rng& rng,
                       std::optional<int> single_member) {
  return evaluate_policy(
      env,
      [&](const Tensor& obs, std::span<const int> last, Rng& r) {
        return learner.act_evaluation(obs, last, r, single_member);
      },
      episodes, rng);
}

TrainingSession::TrainingSession(const ExperimentConfig& config, std::uint64_t seed)
    : config_(config),
      seed_(seed),
      run_id_(resolved_run_id(config)),
      env_(env::make_environment(config.env)),
      learner_(config.learner, env_->spec(), seed),
      buffer_(config.buffer_capacity, learner_.layout(), env_->spec().state_size),
      env_rng_(make_stream(seed, "env")),
      explore_rng_(make_stream(seed, "explore")),
      replay_rng_(make_stream(seed, "replay")),
      eval_rng_(make_stream(seed, "eval")) {
  if (config.family() != Family::Deep) throw Error("TrainingSession: needs a deep algorithm");
  reset_episode();
}

void TrainingSession::reset_episode() {
  current_ = env_->reset(env_rng_);
  last_actions_.assign(static_cast<std::size_t>(env_->spec().n_agents), 0);
  episode_return_ = 0.0;
}

void TrainingSession::emit(const MetricSink& sink, std::int64_t step, const std::string& metric, double value) const {
  sink(MetricRecord{run_id_, seed_, config_.task(), config_.algorithm, step, metric, value});
}

double TrainingSession::evaluate() {
  auto eval_env = env::make_environment(config_.env);
  return evaluate_policy(*eval_env, learner_, config_.eval_episodes, eval_rng_, config_.eval_single_member);
}

void TrainingSession::run(std::int64_t until_step, const MetricSink& sink) {
  const std::int64_t until = std::min(until_step, config_.total_steps);
  const std::int64_t ready = std::max<std::int64_t>(config_.warmup_steps, config_.learner.batch_size);
  while (!stopped_ && step_ < until) {
    std::vector<int> actions = learner_.act_training(current_.observations, last_actions_, step_, explore_rng_);
    env::StepOutcome next = env_->step(actions, env_rng_);
    episode_return_ += next.reward;

    deep::Transition tr;
    tr.observations = current_.observations;
    tr.next_observations = next.observations;
    tr.state = current_.state;
    tr.next_state = next.state;
    tr.actions = actions;
    tr.last_actions = last_actions_;
    tr.reward = next.reward;
    standardizer_.observe(next.reward);
    tr.terminal = next.done && !next.truncated;
    buffer_.add(tr);

    last_actions_ = std::move(actions);
    const bool done = next.done;
    current_ = std::move(next);
    step_ += 1;
    if (done) {
      emit(sink, step_, "episode_return", episode_return_);
      reset_episode();
    }

    if (buffer_.size() >= ready && step_ % config_.train_interval == 0) {
      const deep::UpdateStats stats = learner_.update(buffer_, replay_rng_, config_.reward_standardization ? &standardizer_ : nullptr);
      emit(sink, step_, "loss", stats.loss);
      emit(sink, step_, "grad_norm", stats.grad_norm);
    }

    if (step_ % config_.eval_interval == 0 || step_ == config_.total_steps) {
      const double ret = evaluate();
      emit(sink, step_, "eval_return", ret);
      if (config_.stop_at_return && ret >= *config_.stop_at_return) {
        stopped_ = true;
        emit(sink, step_, "early_stop", 1.0);
      }
    }
  }
}

deep::Checkpoint TrainingSession::checkpoint() {
  deep::Checkpoint ck;
  ck.strings["algorithm"] = config_.algorithm;
  ck.strings["task"] = config_.task();
  ck.integers["seed"] = {static_cast<std::int64_t>(seed_)};
  ck.integers["step"] = {step_};
  ck.integers["stopped"] = {stopped_ ? 1 : 0};
  ck.integers["update_count"] = {learner_.update_count()};
  for (ad::Parameter* p : learner_.all_parameters()) ck.tensors["param/" + p->name] = p->value;
  const ad::AdamState& adam = learner_.optimizer();
  ck.integers["adam/step"] = {adam.step};
  for (std::size_t i = 0; i < adam.first_moment.size(); ++i) {
    ck.tensors["adam/m/" + std::to_string(i)] = adam.first_moment[i];
    ck.tensors["adam/v/" + std::to_string(i)] = adam.second_moment[i];
  }

  const auto& st = buffer_.storage();
  ck.tensors["replay/observations"] = st.observations;
  ck.tensors["replay/next_observations"] = st.next_observations;
  ck.tensors["replay/states"] = st.states;
  ck.tensors["replay/next_states"] = st.next_states;
  ck.tensors["replay/rewards"] = st.rewards;
  ck.integers["replay/actions"] = std::vector<std::int64_t>(st.actions.data(), st.actions.data() + st.actions.size());
  ck.integers["replay/last_actions"] =
      std::vector<std::int64_t>(st.last_actions.data(), st.last_actions.data() + st.last_actions.size());
  ck.integers["replay/terminal"] = std::vector<std::int64_t>(st.terminal.data(), st.terminal.data() + st.terminal.size());
  ck.integers["replay/size"] = {buffer_.size()};
  ck.integers["replay/next"] = {buffer_.next_slot()};

  ck.integers["standardizer/count"] = {standardizer_.count()};
  ck.set_scalar("standardizer/mean", standardizer_.mean());
  ck.set_scalar("standardizer/m2", standardizer_.m2());

  ck.integers["env/state"] = env_->save_state();
  ck.integers["episode/last_actions"] = std::vector<std::int64_t>(last_actions_.begin(), last_actions_.end());
  ck.set_scalar("episode/return", episode_return_);
  ck.strings["rng/env"] = deep::rng_state(env_rng_);
  ck.strings["rng/explore"] = deep::rng_state(explore_rng_);
  ck.strings["rng/replay"] = deep::rng_state(replay_rng_);
  ck.strings["rng/eval"] = deep::rng_state(eval_rng_);
  return ck;
}

void TrainingSession::restore(const deep::Checkpoint& ck) {
  if (ck.text("algorithm") != config_.algorithm) throw Error("checkpoint: algorithm does not match the config");
  if (ck.text("task") != config_.task()) throw Error("checkpoint: task does not match the config");
  seed_ = static_cast<std::uint64_t>(ck.scalar_int("seed"));
  step_ = ck.scalar_int("step");
  stopped_ = ck.scalar_int("stopped") != 0;
  learner_.set_update_count(ck.scalar_int("update_count"));
  for (ad::Parameter* p : learner_.all_parameters()) {
    const Tensor& t = ck.tensor("param/" + p->name);
    if (t.rows() != p->value.rows() || t.cols() != p->value.cols())
      throw Error("checkpoint: shape mismatch for " + p->name);
    p->value = t;
  }
  ad::AdamState& adam = learner_.optimizer();
  adam.step = ck.scalar_int("adam/step");
  for (std::size_t i = 0; i < adam.first_moment.size(); ++i) {
    adam.first_moment[i] = ck.tensor("adam/m/" + std::to_string(i));
    adam.second_moment[i] = ck.tensor("adam/v/" + std::to_string(i));
  }

  deep::ReplayBuffer::Storage st;
  st.observations = ck.tensor("replay/observations");
  st.next_observations = ck.tensor("replay/next_observations");
  st.states = ck.tensor("replay/states");
  st.next_states = ck.tensor("replay/next_states");
  const Tensor& rewards = ck.tensor("replay/rewards");
  st.rewards = Eigen::Map<const Eigen::VectorXd>(rewards.data(), rewards.size());
  const Index rows = st.observations.rows();
  const int n = learner_.layout().n_agents;
  const auto& acts = ck.ints("replay/actions");
  const auto& last = ck.ints("replay/last_actions");
  const auto& term = ck.ints("replay/terminal");
  if (static_cast<Index>(acts.size()) != rows * n || static_cast<Index>(last.size()) != rows * n ||
      static_cast<Index>(term.size()) != rows)
    throw Error("checkpoint: replay arrays have inconsistent lengths");
  st.actions.resize(rows, n);
  st.last_actions.resize(rows, n);
  st.terminal.resize(rows);
  for (Index i = 0; i < rows * n; ++i) {
    st.actions.data()[i] = static_cast<int>(acts[static_cast<std::size_t>(i)]);
    st.last_actions.data()[i] = static_cast<int>(last[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < rows; ++i) st.terminal(i) = static_cast<int>(term[static_cast<std::size_t>(i)]);
  buffer_.restore(std::move(st), ck.scalar_int("replay/size"), ck.scalar_int("replay/next"));

  standardizer_.restore(ck.scalar_int("standardizer/count"), ck.scalar("standardizer/mean"),
                        ck.scalar("standardizer/m2"));
  env_->load_state(ck.ints("env/state"));
  current_ = env_->observe();
  const auto& la = ck.ints("episode/last_actions");
  last_actions_.assign(la.begin(), la.end());
  episode_return_ = ck.scalar("episode/return");
  deep::set_rng_state(env_rng_, ck.text("rng/env"));
  deep::set_rng_state(explore_rng_, ck.text("rng/explore"));
  deep::set_rng_state(replay_rng_, ck.text("rng/replay"));
  deep::set_rng_state(eval_rng_, ck.text("rng/eval"));
}

void run_tabular_seed(const ExperimentConfig& config, std::uint64_t seed, const MetricSink& sink) {
  if (config.total_steps == 0) return;
  const tabular::ClimbingRun run = tabular::run_climbing(config.tabular, seed, config.total_steps, config.eval_interval);
  const std::string run_id = resolved_run_id(config);
  auto emit = [&](std::int64_t step, const std::string& metric, double value) {
    sink(MetricRecord{run_id, seed, config.task(), config.algorithm, step, metric, value});
  };
  for (const tabular::ClimbingSnapshot& s : run.trace) {
    emit(s.step, "eval_return", s.greedy_reward);
    for (int i = 0; i < 2; ++i) {
      const std::string agent = "agent" + std::to_string(i);
      emit(s.step, agent + "/greedy_action", s.greedy_actions[static_cast<std::size_t>(i)]);
      for (int a = 0; a < 3; ++a) {
        emit(s.step, agent + "/q/" + kActionNames[a], s.q_values[static_cast<std::size_t>(i)](a));
        emit(s.step, agent + "/uncertainty/" + kActionNames[a], s.uncertainty[static_cast<std::size_t>(i)](a));
      }
    }
  }
}

std::string resolved_run_id(const ExperimentConfig& config) {
  return config.run_id.empty() ? config.algorithm + "_" + config.task() : config.run_id;
}

bool RunArtifacts::all_failed() const {
  return !seeds.empty() && std::none_of(seeds.begin(), seeds.end(), [](const SeedArtifacts& s) { return s.ok; });
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunArtifacts art;
  const std::string run_id = resolved_run_id(config);
  art.directory = std::filesystem::path(config.output_dir) / run_id;
  std::filesystem::create_directories(art.directory);
  const std::string header = serialize_config(config);

  nlohmann::ordered_json timing;
  timing["run_id"] = run_id;
  for (std::uint64_t seed : config.seeds) {
    SeedArtifacts sa;
    sa.seed = seed;
    sa.metrics_path = art.directory / ("seed_" + std::to_string(seed) + ".csv");
    const auto start = std::chrono::steady_clock::now();
    MetricsWriter writer(sa.metrics_path, header);
    const MetricSink sink = [&](const MetricRecord& r) { writer.write(r); };
    try {
      if (config.family() == Family::Tabular) {
        run_tabular_seed(config, seed, sink);
      } else {
        TrainingSession session(config, seed);
        session.run(sink);
        if (config.save_checkpoint) {
          sa.checkpoint_path = art.directory / ("seed_" + std::to_string(seed) + ".ckpt");
          session.checkpoint().save(sa.checkpoint_path);
        }
      }
      sa.ok = true;
    } catch (const std::exception& e) {
      sa.error = e.what();
      writer.comment(std::string("error: ") + e.what());
      writer.write(MetricRecord{run_id, seed, config.task(), config.algorithm, 0, "failure", 1.0});
    }
    writer.flush();
    sa.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    timing["seeds"].push_back({{"seed", seed}, {"ok", sa.ok}, {"seconds", sa.seconds}, {"error", sa.error}});
    art.seeds.push_back(std::move(sa));
  }
  art.timing_path = art.directory / "timing.json";
  std::ofstream(art.timing_path) << timing.dump(2) << '\n';
  return art;
}

}  // namespace emax::harness
