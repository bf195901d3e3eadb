#include "emax/deep/losses.hpp"

namespace emax::deep {

namespace {

std::vector<Index> argmax_columns(const Tensor& values) {
  std::vector<Index> out(static_cast<std::size_t>(values.rows()));
  for (Index r = 0; r < values.rows(); ++r) values.row(r).maxCoeff(&out[static_cast<std::size_t>(r)]);
  return out;
}

Tensor tile_rows(const Tensor& column, int times) { return column.replicate(times, 1); }

/// Splits a stacked (N*B) x 1 column into a B x N matrix node.
ad::NodeId per_agent_columns(ad::Graph& g, ad::NodeId stacked, const Batch& batch) {
  std::vector<ad::NodeId> parts;
  for (int i = 0; i < batch.n_agents; ++i) parts.push_back(g.select_rows(stacked, batch.agent_rows(i)));
  return parts.size() == 1 ? parts.front() : g.concatenate(parts, 1);
}

ad::NodeId agent_sum(ad::Graph& g, ad::NodeId stacked, const Batch& batch) {
  ad::NodeId total = g.select_rows(stacked, batch.agent_rows(0));
  for (int i = 1; i < batch.n_agents; ++i) total = g.add(total, g.select_rows(stacked, batch.agent_rows(i)));
  return total;
}

}  // namespace

std::string mixing_name(Mixing m) {
  switch (m) {
    case Mixing::Independent: return "independent";
    case Mixing::Vdn: return "vdn";
    case Mixing::Qmix: return "qmix";
  }
  return "?";
}

LossTerms td_loss(ad::Graph& g, const LossContext& ctx, std::span<ValueNet> online, std::span<ValueNet> target_side,
                  std::span<const Batch> batches) {
  if (online.empty() || target_side.empty()) throw Error("td_loss: no networks");
  if (batches.size() != online.size()) throw Error("td_loss: need one batch per online network");
  if (ctx.mixing == Mixing::Qmix && (ctx.mixer == nullptr || ctx.target_mixer == nullptr))
    throw Error("td_loss: qmix needs an online and a target mixer");
  for (const Batch& b : batches)
    if (b.size < 1) throw Error("td_loss: empty batch");

  // Bootstrap values for all batches at once: every target-side net sees the
  // concatenated next inputs, the mean is taken, then gradients are cut.
  std::vector<Tensor> next_parts;
  std::vector<Index> offsets{0};
  for (const Batch& b : batches) {
    next_parts.push_back(b.next_inputs);
    offsets.push_back(offsets.back() + b.next_inputs.rows());
  }
  Tensor all_next(offsets.back(), batches.front().next_inputs.cols());
  for (std::size_t k = 0; k < next_parts.size(); ++k)
    all_next.middleRows(offsets[k], next_parts[k].rows()) = next_parts[k];
  const ad::NodeId next_in = g.constant(std::move(all_next));
  ad::NodeId next_sum = target_side[0].build(g, next_in);
  for (std::size_t m = 1; m < target_side.size(); ++m) next_sum = g.add(next_sum, target_side[m].build(g, next_in));
  const ad::NodeId next_mean =
      g.stop_gradient(g.scale(next_sum, 1.0 / static_cast<double>(target_side.size())));

  LossTerms terms;
  for (std::size_t k = 0; k < online.size(); ++k) {
    const Batch& batch = batches[k];
    const int n = batch.n_agents;
    std::vector<Index> rows(static_cast<std::size_t>(batch.next_inputs.rows()));
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = offsets[k] + static_cast<Index>(r);
    const ad::NodeId next_q = g.select_rows(next_mean, std::move(rows));
    const ad::NodeId next_max = g.gather_entries(next_q, argmax_columns(g.value(next_q)));

    const ad::NodeId q_all = online[k].build(g, g.constant(batch.inputs));
    const ad::NodeId q_taken = g.gather_entries(q_all, batch.actions);

    ad::NodeId loss;
    if (ctx.mixing == Mixing::Independent) {
      const ad::NodeId reward = g.constant(tile_rows(batch.rewards, n));
      const ad::NodeId discount = g.constant(tile_rows(ctx.gamma * batch.not_terminal, n));
      const ad::NodeId y = g.add(reward, g.multiply(discount, next_max));
      loss = g.scale(g.sum(g.square(g.subtract(q_taken, y))), 1.0 / static_cast<double>(batch.size));
    } else {
      ad::NodeId q_tot, next_tot;
      if (ctx.mixing == Mixing::Vdn) {
        q_tot = agent_sum(g, q_taken, batch);
        next_tot = agent_sum(g, next_max, batch);
      } else {
        q_tot = ctx.mixer->build(g, per_agent_columns(g, q_taken, batch), g.constant(batch.states));
        next_tot = g.stop_gradient(
            ctx.target_mixer->build(g, per_agent_columns(g, next_max, batch), g.constant(batch.next_states)));
      }
      const ad::NodeId y =
          g.add(g.constant(batch.rewards), g.multiply(g.constant(ctx.gamma * batch.not_terminal), next_tot));
      loss = g.mean(g.square(g.subtract(q_tot, y)));
    }
    terms.members.push_back(loss);
  }
  terms.total = terms.members.front();
  for (std::size_t k = 1; k < terms.members.size(); ++k) terms.total = g.add(terms.total, terms.members[k]);
  return terms;
}

bool target_sync(const ValueNet& online, ValueNet& target, std::int64_t interval, std::int64_t update_count) {
  if (interval <= 0) throw Error("target_sync: interval must be positive");
  if (update_count <= 0 || update_count % interval != 0) return false;
  target.copy_from(online);
  return true;
}

bool target_sync(const QmixMixer& online, QmixMixer& target, std::int64_t interval, std::int64_t update_count) {
  if (interval <= 0) throw Error("target_sync: interval must be positive");
  if (update_count <= 0 || update_count % interval != 0) return false;
  target.copy_from(online);
  return true;
}

}  // namespace emax::deep
