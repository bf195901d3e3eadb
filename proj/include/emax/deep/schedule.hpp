#pragma once

#include <cstdint>

namespace emax::deep {

/// Linear decay from `start` to `final` over `decay_steps`, then constant.
struct EpsilonSchedule {
  double start = 1.0;
  double final = 0.05;
  std::int64_t decay_steps = 200000;
  double evaluation = 0.05;

  double value(std::int64_t t) const;
};

/// Running mean and population variance (Welford) of raw rewards.
class RewardStandardizer {
 public:
  explicit RewardStandardizer(double eps = 1e-6) : eps_(eps) {}

  /// Folds r into the statistics.
  void observe(double r);
  /// Folds r into the statistics, then returns (r - mean) / sqrt(var + eps).
  double standardize(double r);
  /// Applies the current statistics without updating them.
  double apply(double r) const;

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0; }
  double eps() const { return eps_; }

  // Checkpoint access.
  double m2() const { return m2_; }
  void restore(std::int64_t count, double mean, double m2);

 private:
  double eps_;
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace emax::deep
