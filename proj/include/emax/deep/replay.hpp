#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emax::deep {

/// How per-agent network inputs are assembled from stored transitions:
/// observation ++ one-hot(last action) [++ one-hot(agent id)].
struct InputLayout {
  int n_agents = 0;
  int obs_size = 0;
  int n_actions = 0;
  bool agent_id = false;

  int input_size() const { return obs_size + n_actions + (agent_id ? n_agents : 0); }
};

/// Builds one input row per agent (n_agents x input_size).
Tensor agent_inputs(const InputLayout& layout, const Tensor& observations, std::span<const int> last_actions);

struct Transition {
  /// n_agents x obs_size
  Tensor observations;
  Tensor next_observations;
  RowVectorX<double> state;
  RowVectorX<double> next_state;
  std::vector<int> actions;
  /// Actions taken on the previous step (zeros at episode start).
  std::vector<int> last_actions;
  double reward = 0.0;
  /// True only for real terminal states; time-limit ends keep bootstrapping.
  bool terminal = false;
};

/// A sampled batch of B transitions. Per-agent rows are stacked agent-major:
/// row i * B + b holds agent i of transition b.
struct Batch {
  int size = 0;
  int n_agents = 0;
  Tensor inputs;
  Tensor next_inputs;
  std::vector<Index> actions;
  /// B x 1
  Tensor rewards;
  /// B x 1, 0 for terminal transitions.
  Tensor not_terminal;
  Tensor states;
  Tensor next_states;
  std::vector<std::int64_t> indices;

  /// Row indices of agent i within the stacked tensors.
  std::vector<Index> agent_rows(int agent) const;
};

/// Fixed-capacity ring buffer of transitions.
class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  ReplayBuffer(std::int64_t capacity, InputLayout layout, int state_size);

  void add(const Transition& t);
  std::int64_t size() const { return size_; }
  std::int64_t capacity() const { return capacity_; }
  const InputLayout& layout() const { return layout_; }

  Batch make_batch(std::span<const std::int64_t> indices) const;
  /// Uniform draw with replacement.
  Batch sample(int batch_size, Rng& rng) const;

  // Raw storage, exposed for checkpointing. Rows grow on demand up to capacity.
  struct Storage {
    Tensor observations, next_observations, states, next_states;
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> actions, last_actions;
    Eigen::VectorXd rewards;
    Eigen::Matrix<int, Eigen::Dynamic, 1> terminal;
  };
  const Storage& storage() const { return data_; }
  void restore(Storage data, std::int64_t size, std::int64_t next);
  std::int64_t next_slot() const { return next_; }

 private:
  void reserve(std::int64_t rows);

  std::int64_t capacity_ = 0;
  std::int64_t size_ = 0;
  std::int64_t next_ = 0;
  InputLayout layout_;
  int state_size_ = 0;
  Storage data_;
};

/// K independent uniform-with-replacement batches, one per ensemble member.
std::vector<Batch> sample_bootstrapped_batches(const ReplayBuffer& buffer, int k, int batch_size, Rng& rng);

}  // namespace emax::deep
