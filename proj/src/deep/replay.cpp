#include "emax/deep/replay.hpp"

#include "emax/rng.hpp"

namespace emax::deep {

namespace {

void write_inputs(const InputLayout& layout, Tensor& out, Index row, const double* obs, const int* last_actions,
                  int agent) {
  out.row(row).setZero();
  for (int j = 0; j < layout.obs_size; ++j) out(row, j) = obs[j];
  out(row, layout.obs_size + last_actions[agent]) = 1.0;
  if (layout.agent_id) out(row, layout.obs_size + layout.n_actions + agent) = 1.0;
}

}  // namespace

Tensor agent_inputs(const InputLayout& layout, const Tensor& observations, std::span<const int> last_actions) {
  if (observations.rows() != layout.n_agents || observations.cols() != layout.obs_size)
    throw Error("agent_inputs: observation shape " + shape_string(observations) + " does not match layout");
  if (last_actions.size() != static_cast<std::size_t>(layout.n_agents)) throw Error("agent_inputs: wrong action count");
  Tensor out(layout.n_agents, layout.input_size());
  for (int i = 0; i < layout.n_agents; ++i) {
    if (last_actions[static_cast<std::size_t>(i)] < 0 || last_actions[static_cast<std::size_t>(i)] >= layout.n_actions)
      throw Error("agent_inputs: last action out of range");
    write_inputs(layout, out, i, observations.row(i).data(), last_actions.data(), i);
  }
  return out;
}

std::vector<Index> Batch::agent_rows(int agent) const {
  std::vector<Index> rows(static_cast<std::size_t>(size));
  for (int b = 0; b < size; ++b) rows[static_cast<std::size_t>(b)] = static_cast<Index>(agent) * size + b;
  return rows;
}

ReplayBuffer::ReplayBuffer(std::int64_t capacity, InputLayout layout, int state_size)
    : capacity_(capacity), layout_(layout), state_size_(state_size) {
  if (capacity < 1) throw Error("ReplayBuffer: capacity must be positive");
  reserve(std::min<std::int64_t>(capacity, 1024));
}

void ReplayBuffer::reserve(std::int64_t rows) {
  const Index obs_cols = static_cast<Index>(layout_.n_agents) * layout_.obs_size;
  data_.observations.conservativeResize(rows, obs_cols);
  data_.next_observations.conservativeResize(rows, obs_cols);
  data_.states.conservativeResize(rows, state_size_);
  data_.next_states.conservativeResize(rows, state_size_);
  data_.actions.conservativeResize(rows, layout_.n_agents);
  data_.last_actions.conservativeResize(rows, layout_.n_agents);
  data_.rewards.conservativeResize(rows);
  data_.terminal.conservativeResize(rows);
}

void ReplayBuffer::add(const Transition& t) {
  const int n = layout_.n_agents;
  if (t.observations.rows() != n || t.observations.cols() != layout_.obs_size ||
      t.next_observations.rows() != n || t.next_observations.cols() != layout_.obs_size)
    throw Error("ReplayBuffer::add: observation shape mismatch");
  if (t.state.size() != state_size_ || t.next_state.size() != state_size_)
    throw Error("ReplayBuffer::add: state size mismatch");
  if (t.actions.size() != static_cast<std::size_t>(n) || t.last_actions.size() != static_cast<std::size_t>(n))
    throw Error("ReplayBuffer::add: action count mismatch");
  const Index r = next_;
  if (r >= data_.rewards.size()) reserve(std::min<std::int64_t>(capacity_, 2 * data_.rewards.size()));
  data_.observations.row(r) = Eigen::Map<const RowVectorX<double>>(t.observations.data(), t.observations.size());
  data_.next_observations.row(r) =
      Eigen::Map<const RowVectorX<double>>(t.next_observations.data(), t.next_observations.size());
  data_.states.row(r) = t.state;
  data_.next_states.row(r) = t.next_state;
  for (int i = 0; i < n; ++i) {
    data_.actions(r, i) = t.actions[static_cast<std::size_t>(i)];
    data_.last_actions(r, i) = t.last_actions[static_cast<std::size_t>(i)];
  }
  data_.rewards(r) = t.reward;
  data_.terminal(r) = t.terminal ? 1 : 0;
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Batch ReplayBuffer::make_batch(std::span<const std::int64_t> indices) const {
  if (indices.empty()) throw Error("ReplayBuffer: empty batch");
  const int n = layout_.n_agents;
  const int bsz = static_cast<int>(indices.size());
  Batch batch;
  batch.size = bsz;
  batch.n_agents = n;
  batch.inputs.resize(static_cast<Index>(n) * bsz, layout_.input_size());
  batch.next_inputs.resize(static_cast<Index>(n) * bsz, layout_.input_size());
  batch.actions.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(bsz));
  batch.rewards.resize(bsz, 1);
  batch.not_terminal.resize(bsz, 1);
  batch.states.resize(bsz, state_size_);
  batch.next_states.resize(bsz, state_size_);
  batch.indices.assign(indices.begin(), indices.end());
  for (int b = 0; b < bsz; ++b) {
    const std::int64_t idx = indices[static_cast<std::size_t>(b)];
    if (idx < 0 || idx >= size_) throw Error("ReplayBuffer: index out of range");
    const int* last = data_.last_actions.row(idx).data();
    const int* taken = data_.actions.row(idx).data();
    for (int i = 0; i < n; ++i) {
      const Index row = static_cast<Index>(i) * bsz + b;
      write_inputs(layout_, batch.inputs, row, data_.observations.row(idx).data() + i * layout_.obs_size, last, i);
      write_inputs(layout_, batch.next_inputs, row, data_.next_observations.row(idx).data() + i * layout_.obs_size,
                   taken, i);
      batch.actions[static_cast<std::size_t>(row)] = taken[i];
    }
    batch.rewards(b, 0) = data_.rewards(idx);
    batch.not_terminal(b, 0) = data_.terminal(idx) ? 0.0 : 1.0;
    batch.states.row(b) = data_.states.row(idx);
    batch.next_states.row(b) = data_.next_states.row(idx);
  }
  return batch;
}

Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (batch_size < 1) throw Error("ReplayBuffer: batch size must be positive");
  if (size_ < batch_size)
    throw Error("ReplayBuffer: holds " + std::to_string(size_) + " transitions, batch needs " +
                std::to_string(batch_size));
  std::vector<std::int64_t> indices(static_cast<std::size_t>(batch_size));
  for (auto& i : indices) i = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(size_)));
  return make_batch(indices);
}

void ReplayBuffer::restore(Storage data, std::int64_t size, std::int64_t next) {
  if (data.observations.rows() < size || data.observations.rows() > capacity_ || data.states.cols() != state_size_ || size < 0 || size > capacity_ ||
      next < 0 || next >= capacity_ || (size < capacity_ && next != size))
    throw Error("ReplayBuffer::restore: storage does not match buffer");
  data_ = std::move(data);
  size_ = size;
  next_ = next;
}

std::vector<Batch> sample_bootstrapped_batches(const ReplayBuffer& buffer, int k, int batch_size, Rng& rng) {
  if (k < 1) throw Error("sample_bootstrapped_batches: k must be positive");
  std::vector<Batch> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(buffer.sample(batch_size, rng));
  return out;
}

}  // namespace emax::deep
