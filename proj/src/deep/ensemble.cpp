#include "emax/deep/ensemble.hpp"

#include "emax/rng.hpp"

namespace emax::deep {

EnsembleValues ensemble_stats(std::span<const Tensor> member_outputs) {
  if (member_outputs.empty()) throw Error("ensemble_stats: no members");
  const Tensor& first = member_outputs.front();
  EnsembleValues out;
  out.mean = Tensor::Zero(first.rows(), first.cols());
  for (const Tensor& q : member_outputs) {
    if (q.rows() != first.rows() || q.cols() != first.cols()) throw Error("ensemble_stats: member shape mismatch");
    out.mean += q;
  }
  const double k = static_cast<double>(member_outputs.size());
  out.mean /= k;
  out.std = Tensor::Zero(first.rows(), first.cols());
  for (const Tensor& q : member_outputs) out.std += (q - out.mean).cwiseAbs2();
  out.std = (out.std / k).cwiseSqrt();
  return out;
}

EnsembleValues ensemble_stats(std::span<const ValueNet> members, const Tensor& inputs) {
  std::vector<Tensor> outputs;
  outputs.reserve(members.size());
  for (const ValueNet& net : members) outputs.push_back(net.forward(inputs));
  return ensemble_stats(outputs);
}

int ucb_action(const RowVectorX<double>& mean, const RowVectorX<double>& std, double beta, Rng& rng) {
  if (beta < 0.0) throw Error("ucb_action: beta must be >= 0");
  const RowVectorX<double> score = mean + beta * std;
  return static_cast<int>(argmax_random_tie(score, rng));
}

std::vector<int> vote_counts(std::span<const RowVectorX<double>> member_values) {
  if (member_values.empty()) throw Error("majority_vote_action: no members");
  std::vector<int> votes(static_cast<std::size_t>(member_values.front().size()), 0);
  for (const auto& q : member_values) {
    if (static_cast<std::size_t>(q.size()) != votes.size()) throw Error("majority_vote_action: action count mismatch");
    const double best = q.maxCoeff();
    for (Index a = 0; a < q.size(); ++a)
      if (q(a) == best) votes[static_cast<std::size_t>(a)] += 1;
  }
  return votes;
}

int majority_vote_action(std::span<const RowVectorX<double>> member_values, Rng& rng) {
  const std::vector<int> votes = vote_counts(member_values);
  std::vector<double> as_double(votes.begin(), votes.end());
  return static_cast<int>(argmax_random_tie(std::span<const double>(as_double), rng));
}

}  // namespace emax::deep
