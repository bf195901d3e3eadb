#include "emax/deep/schedule.hpp"

#include "emax/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace emax::deep {

double EpsilonSchedule::value(std::int64_t t) const {
  if (t < 0) throw Error("EpsilonSchedule: negative step");
  if (decay_steps <= 0 || t >= decay_steps) return final;
  const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
  return start + frac * (final - start);
}

void RewardStandardizer::observe(double r) {
  count_ += 1;
  const double delta = r - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (r - mean_);
}

double RewardStandardizer::standardize(double r) {
  observe(r);
  return apply(r);
}

double RewardStandardizer::apply(double r) const { return (r - mean_) / std::sqrt(variance() + eps_); }

void RewardStandardizer::restore(std::int64_t count, double mean, double m2) {
  if (count < 0 || m2 < 0.0) throw Error("RewardStandardizer: invalid statistics");
  count_ = count;
  mean_ = mean;
  m2_ = m2;
}

}  // namespace emax::deep
