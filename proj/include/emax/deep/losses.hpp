#pragma once

#include "emax/deep/mixer.hpp"
#include "emax/deep/replay.hpp"
#include "emax/deep/value_net.hpp"

#include <span>
#include <string>

namespace emax::deep {

enum class Mixing { Independent, Vdn, Qmix };

std::string mixing_name(Mixing m);

struct LossContext {
  Mixing mixing = Mixing::Independent;
  double gamma = 0.99;
  /// Online and delayed mixers; required for Mixing::Qmix.
  QmixMixer* mixer = nullptr;
  QmixMixer* target_mixer = nullptr;
};

struct LossTerms {
  ad::NodeId total;
  std::vector<ad::NodeId> members;
};

/// TD loss for every online net k on batches[k]. Bootstrap values come from
/// the mean of the target-side nets on the next inputs, behind a
/// stop-gradient:
///   - baseline: online = {net}, target_side = {target net}
///   - EMAX:     online = target_side = the K ensemble members
/// Per member the loss is the batch mean of the squared TD error, summed over
/// agents for independent learners; members are summed into `total`.
/// Terminal transitions drop the bootstrap term.
LossTerms td_loss(ad::Graph& graph, const LossContext& ctx, std::span<ValueNet> online,
                  std::span<ValueNet> target_side, std::span<const Batch> batches);

/// Hard copy of online into target every `interval` updates. Returns true
/// when a copy happened.
bool target_sync(const ValueNet& online, ValueNet& target, std::int64_t interval, std::int64_t update_count);
bool target_sync(const QmixMixer& online, QmixMixer& target, std::int64_t interval, std::int64_t update_count);

}  // namespace emax::deep
