#pragma once

#include "emax/tensor.hpp"

#include <span>
#include <utility>
#include <vector>

namespace emax::metrics {

/// Mean of the values left after sorting and dropping floor(n/4) from each end.
double iqm(std::span<const double> values);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap of the IQM.
Interval bootstrap_ci(std::span<const double> values, Rng& rng, int n_resamples = 2000, double level = 0.95);

/// (v - min) / (max - min) clipped to [0, 1]; everything maps to 0 when max <= min.
double normalize_return(double v, double min, double max);
std::vector<double> normalize_returns(std::span<const double> values, double min, double max);

/// Uniform grid of `points` thresholds over [0, 1].
std::vector<double> tau_grid(int points);
/// Fraction of scores strictly above each threshold.
std::vector<double> performance_profile(std::span<const double> scores, std::span<const double> taus);

/// Consecutive differences of the sequence.
std::vector<double> detrend(std::span<const double> values);
/// Empirical quantile as the order statistic at ceil(q * n) (1-based).
double value_at_risk(std::span<const double> values, double quantile = 0.95);
/// Mean of the detrended gradient norms at or above their VaR.
double cvar_detrended(std::span<const double> grad_norms, double quantile = 0.95);

struct MeanSe {
  double mean = 0.0;
  double standard_error = 0.0;
};
/// Mean and standard error (sample std / sqrt(n); 0 for a single value).
MeanSe mean_standard_error(std::span<const double> values);

}  // namespace emax::metrics
