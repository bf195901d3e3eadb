#include "emax/harness/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace emax::harness {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

struct DeepAlgorithm {
  deep::Mixing mixing;
  bool emax;
};

std::optional<DeepAlgorithm> parse_deep(const std::string& name) {
  const bool emax = name.size() > 5 && name.ends_with("_emax");
  const std::string base = emax ? name.substr(0, name.size() - 5) : name;
  if (base == "idqn") return DeepAlgorithm{deep::Mixing::Independent, emax};
  if (base == "vdn") return DeepAlgorithm{deep::Mixing::Vdn, emax};
  if (base == "qmix") return DeepAlgorithm{deep::Mixing::Qmix, emax};
  return std::nullopt;
}

bool is_tabular(const std::string& name) {
  try {
    tabular::parse_variant(name);
    return true;
  } catch (const Error&) {
    return false;
  }
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError((prefix_.empty() ? std::string("config") : "field '" + prefix_ + "'") +
                                             ": expected a JSON object");
  }

  bool has(const std::string& key) {
    if (!obj_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) field_error(name(key), "expected true or false");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) field_error(name(key), "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) out = v.get<T>();
        else field_error(name(key), "expected a non-negative integer");
      } else {
        const auto wide = v.get<std::int64_t>();
        if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max())
          field_error(name(key), "integer out of range");
        out = static_cast<T>(wide);
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) field_error(name(key), "expected a number");
      out = v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) field_error(name(key), "expected a string");
      out = v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    if (obj_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    read(key, v);
    out = v;
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) field_error(name(it.key()), "unknown key");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> used_;
};

env::EnvConfig parse_env(const json& j) {
  Reader r(j, "env");
  std::string name;
  r.read("name", name);
  env::EnvConfig out;
  if (name == "climbing") {
    out = env::ClimbingConfig{};
  } else if (name == "lbf") {
    env::LbfConfig c;
    r.read("width", c.width);
    r.read("height", c.height);
    r.read("n_agents", c.n_agents);
    r.read("n_food", c.n_food);
    r.read("coop", c.coop);
    r.read("penalty", c.penalty);
    r.read("max_steps", c.max_steps);
    r.read("max_agent_level", c.max_agent_level);
    out = c;
  } else if (name == "bpush") {
    env::BpushConfig c;
    r.read("width", c.width);
    r.read("height", c.height);
    r.read("n_agents", c.n_agents);
    r.read("max_steps", c.max_steps);
    out = c;
  } else {
    field_error("env.name", "expected climbing, lbf or bpush, got '" + name + "'");
  }
  r.reject_unknown();
  return out;
}

ordered env_to_json(const env::EnvConfig& e) {
  ordered j;
  j["name"] = env_name(e);
  if (const auto* c = std::get_if<env::LbfConfig>(&e)) {
    j["width"] = c->width;
    j["height"] = c->height;
    j["n_agents"] = c->n_agents;
    j["n_food"] = c->n_food;
    j["coop"] = c->coop;
    j["penalty"] = c->penalty;
    j["max_steps"] = c->max_steps;
    j["max_agent_level"] = c->max_agent_level;
  } else if (const auto* b = std::get_if<env::BpushConfig>(&e)) {
    j["width"] = b->width;
    j["height"] = b->height;
    j["n_agents"] = b->n_agents;
    j["max_steps"] = b->max_steps;
  }
  return j;
}

}  // namespace

Family ExperimentConfig::family() const { return is_tabular(algorithm) ? Family::Tabular : Family::Deep; }

std::string ExperimentConfig::task() const { return task_id(env); }

std::string env_name(const env::EnvConfig& env) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, env::ClimbingConfig>) return "climbing";
        else if constexpr (std::is_same_v<T, env::LbfConfig>) return "lbf";
        else return "bpush";
      },
      env);
}

std::string task_id(const env::EnvConfig& env) {
  if (const auto* c = std::get_if<env::LbfConfig>(&env)) {
    std::string id = "lbf-" + std::to_string(c->width) + "x" + std::to_string(c->height) + "-" +
                     std::to_string(c->n_agents) + "p-" + std::to_string(c->n_food) + "f";
    if (c->coop) id += "-coop";
    if (c->penalty > 0.0) id += "-pen";
    return id;
  }
  if (const auto* b = std::get_if<env::BpushConfig>(&env))
    return "bpush-" + std::to_string(b->width) + "x" + std::to_string(b->height) + "-" + std::to_string(b->n_agents) +
           "p";
  return "climbing";
}

ExperimentConfig default_config(const std::string& algorithm) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  if (is_tabular(algorithm)) {
    c.env = env::ClimbingConfig{};
    c.tabular = tabular::TabularSettings::defaults(tabular::parse_variant(algorithm));
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 100; ++s) c.seeds.push_back(s);
    c.total_steps = 1000;
    c.eval_interval = 10;
    c.eval_episodes = 1;
    return c;
  }
  const auto deep_algo = parse_deep(algorithm);
  if (!deep_algo)
    field_error("algorithm", "unknown algorithm '" + algorithm +
                                 "' (expected idqn, vdn, qmix, their _emax variants, or iql_eps, iql_ucb, "
                                 "ens_iql_eps, ens_iql_ucb)");
  c.learner.mixing = deep_algo->mixing;
  c.learner.emax = deep_algo->emax;
  return c;
}

void ExperimentConfig::validate() const {
  const Family fam = family();
  if (seeds.empty()) field_error("seeds", "at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    field_error("seeds", "seeds must be distinct");
  if (total_steps < 0) field_error("total_steps", "must be >= 0");
  if (eval_interval < 1) field_error("eval_interval", "must be >= 1");
  if (eval_episodes < 1) field_error("eval_episodes", "must be >= 1");
  if (output_dir.empty()) field_error("output_dir", "must not be empty");
  if (run_id.find_first_of("/\\ ,\n") != std::string::npos)
    field_error("run_id", "must not contain separators, commas or whitespace");
  try {
    std::visit(
        [](const auto& c) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(c)>, env::ClimbingConfig>) c.validate();
        },
        env);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    field_error("env", e.what());
  }

  if (fam == Family::Tabular) {
    if (!std::holds_alternative<env::ClimbingConfig>(env))
      field_error("env.name", "tabular algorithms run on the climbing game only");
    try {
      tabular.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    return;
  }

  const deep::LearnerConfig& l = learner;
  if (l.emax && l.ensemble_size < 2) field_error("ensemble_size", "must be >= 2 for emax algorithms");
  if (l.ensemble_size < 1) field_error("ensemble_size", "must be >= 1");
  if (l.beta < 0.0) field_error("beta", "must be >= 0");
  if (!(l.gamma >= 0.0 && l.gamma <= 1.0)) field_error("gamma", "must lie in [0, 1]");
  if (!(l.lr > 0.0)) field_error("lr", "must be > 0");
  if (!(l.max_grad_norm > 0.0)) field_error("max_grad_norm", "must be > 0");
  if (l.hidden_size < 1) field_error("hidden_size", "must be >= 1");
  if (l.batch_size < 1) field_error("batch_size", "must be >= 1");
  if (l.target_interval < 1) field_error("target_interval", "must be >= 1");
  if (l.mixer_embed < 1) field_error("mixer_embed", "must be >= 1");
  if (l.hypernet_embed < 1) field_error("hypernet_embed", "must be >= 1");
  if (!(l.epsilon.start >= 0.0 && l.epsilon.start <= 1.0)) field_error("epsilon_start", "must lie in [0, 1]");
  if (!(l.epsilon.final >= 0.0 && l.epsilon.final <= 1.0)) field_error("epsilon_final", "must lie in [0, 1]");
  if (l.epsilon.decay_steps < 0) field_error("epsilon_decay_steps", "must be >= 0");
  if (!(l.epsilon.evaluation >= 0.0 && l.epsilon.evaluation <= 1.0)) field_error("eval_epsilon", "must lie in [0, 1]");
  if (buffer_capacity < l.batch_size) field_error("buffer_capacity", "must be >= batch_size");
  if (warmup_steps < 0) field_error("warmup_steps", "must be >= 0");
  if (train_interval < 1) field_error("train_interval", "must be >= 1");
  if (eval_single_member && (*eval_single_member < 0 || *eval_single_member >= l.members()))
    field_error("eval_single_member", "must index an ensemble member (0.." + std::to_string(l.members() - 1) + ")");
  if (stop_at_return && !std::isfinite(*stop_at_return)) field_error("stop_at_return", "must be finite");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("algorithm")) field_error("algorithm", "required");
  if (!j["algorithm"].is_string()) field_error("algorithm", "expected a string");

  ExperimentConfig c = default_config(j["algorithm"].get<std::string>());
  const Family fam = c.family();
  Reader r(j, "");
  r.has("algorithm");
  if (r.has("env")) c.env = parse_env(j["env"]);
  r.read("run_id", c.run_id);
  if (r.has("seeds")) {
    const json& s = j["seeds"];
    if (!s.is_array()) field_error("seeds", "expected an array of non-negative integers");
    c.seeds.clear();
    for (const json& v : s) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        field_error("seeds", "expected an array of non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  r.read("total_steps", c.total_steps);
  r.read("eval_interval", c.eval_interval);
  r.read("eval_episodes", c.eval_episodes);
  r.read("output_dir", c.output_dir);

  if (fam == Family::Tabular) {
    tabular::TabularSettings& t = c.tabular;
    r.read("lr", t.lr);
    r.read("init_std", t.init_std);
    r.read("ensemble_size", t.ensemble_size);
    r.read("mask_p", t.mask_p);
    r.read("beta", t.beta);
    r.read("epsilon_start", t.epsilon_start);
    r.read("epsilon_final", t.epsilon_final);
    r.read("epsilon_decay_steps", t.epsilon_decay_steps);
  } else {
    deep::LearnerConfig& l = c.learner;
    r.read("ensemble_size", l.ensemble_size);
    r.read("beta", l.beta);
    r.read("gamma", l.gamma);
    r.read("lr", l.lr);
    r.read("max_grad_norm", l.max_grad_norm);
    r.read("hidden_size", l.hidden_size);
    r.read("batch_size", l.batch_size);
    r.read("target_interval", l.target_interval);
    r.read("epsilon_start", l.epsilon.start);
    r.read("epsilon_final", l.epsilon.final);
    r.read("epsilon_decay_steps", l.epsilon.decay_steps);
    r.read("eval_epsilon", l.epsilon.evaluation);
    r.read("mixer_embed", l.mixer_embed);
    r.read("hypernet_embed", l.hypernet_embed);
    r.read("agent_id_input", l.agent_id_input);
    r.read("buffer_capacity", c.buffer_capacity);
    r.read("warmup_steps", c.warmup_steps);
    r.read("train_interval", c.train_interval);
    r.read("reward_standardization", c.reward_standardization);
    r.read_optional("eval_single_member", c.eval_single_member);
    r.read_optional("stop_at_return", c.stop_at_return);
    r.read("save_checkpoint", c.save_checkpoint);
  }
  r.reject_unknown();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  ordered j;
  j["algorithm"] = c.algorithm;
  j["env"] = env_to_json(c.env);
  j["run_id"] = c.run_id;
  j["seeds"] = c.seeds;
  j["total_steps"] = c.total_steps;
  j["eval_interval"] = c.eval_interval;
  j["eval_episodes"] = c.eval_episodes;
  j["output_dir"] = c.output_dir;
  if (c.family() == Family::Tabular) {
    const tabular::TabularSettings& t = c.tabular;
    j["lr"] = t.lr;
    j["init_std"] = t.init_std;
    j["ensemble_size"] = t.ensemble_size;
    j["mask_p"] = t.mask_p;
    j["beta"] = t.beta;
    j["epsilon_start"] = t.epsilon_start;
    j["epsilon_final"] = t.epsilon_final;
    j["epsilon_decay_steps"] = t.epsilon_decay_steps;
  } else {
    const deep::LearnerConfig& l = c.learner;
    j["ensemble_size"] = l.ensemble_size;
    j["beta"] = l.beta;
    j["gamma"] = l.gamma;
    j["lr"] = l.lr;
    j["max_grad_norm"] = l.max_grad_norm;
    j["hidden_size"] = l.hidden_size;
    j["batch_size"] = l.batch_size;
    j["target_interval"] = l.target_interval;
    j["epsilon_start"] = l.epsilon.start;
    j["epsilon_final"] = l.epsilon.final;
    j["epsilon_decay_steps"] = l.epsilon.decay_steps;
    j["eval_epsilon"] = l.epsilon.evaluation;
    j["mixer_embed"] = l.mixer_embed;
    j["hypernet_embed"] = l.hypernet_embed;
    j["agent_id_input"] = l.agent_id_input;
    j["buffer_capacity"] = c.buffer_capacity;
    j["warmup_steps"] = c.warmup_steps;
    j["train_interval"] = c.train_interval;
    j["reward_standardization"] = c.reward_standardization;
    j["eval_single_member"] = c.eval_single_member ? ordered(*c.eval_single_member) : ordered(nullptr);
    j["stop_at_return"] = c.stop_at_return ? ordered(*c.stop_at_return) : ordered(nullptr);
    j["save_checkpoint"] = c.save_checkpoint;
  }
  return j.dump(2);
}

}  // namespace emax::harness
