#pragma once

#include "emax/deep/value_net.hpp"

#include <span>

namespace emax::deep {

struct EnsembleValues {
  /// rows x actions; mean over members.
  Tensor mean;
  /// rows x actions; population std over members (divisor K).
  Tensor std;
};

/// Mean and standard deviation across member outputs of identical shape.
EnsembleValues ensemble_stats(std::span<const Tensor> member_outputs);
EnsembleValues ensemble_stats(std::span<const ValueNet> members, const Tensor& inputs);

/// argmax mean + beta * std with uniform tie-breaking.
int ucb_action(const RowVectorX<double>& mean, const RowVectorX<double>& std, double beta, Rng& rng);

/// Each member votes for every one of its greedy actions; the action with
/// the most votes wins, ties broken uniformly.
int majority_vote_action(std::span<const RowVectorX<double>> member_values, Rng& rng);

/// Vote counts per action, exposed for inspection.
std::vector<int> vote_counts(std::span<const RowVectorX<double>> member_values);

}  // namespace emax::deep
