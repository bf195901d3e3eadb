#include "emax/metrics.hpp"

#include "emax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emax::metrics {

double iqm(std::span<const double> values) {
  if (values.empty()) throw Error("iqm: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t trim = sorted.size() / 4;
  const auto first = sorted.begin() + static_cast<std::ptrdiff_t>(trim);
  const auto last = sorted.end() - static_cast<std::ptrdiff_t>(trim);
  return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

namespace {

// Linear interpolation between closest ranks on a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Interval bootstrap_ci(std::span<const double> values, Rng& rng, int n_resamples, double level) {
  if (values.empty()) throw Error("bootstrap_ci: empty input");
  if (n_resamples < 1) throw Error("bootstrap_ci: need at least one resample");
  if (!(level > 0.0 && level < 1.0)) throw Error("bootstrap_ci: level must lie in (0, 1)");
  std::vector<double> stats(static_cast<std::size_t>(n_resamples));
  std::vector<double> sample(values.size());
  for (double& s : stats) {
    for (double& x : sample) x = values[uniform_index(rng, values.size())];
    s = iqm(sample);
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  Interval out{percentile(stats, alpha), percentile(stats, 1.0 - alpha)};
  // Keep the point estimate inside the interval even for tiny samples.
  const double point = iqm(values);
  out.low = std::min(out.low, point);
  out.high = std::max(out.high, point);
  return out;
}

double normalize_return(double v, double min, double max) {
  if (!(max > min)) return 0.0;
  return std::clamp((v - min) / (max - min), 0.0, 1.0);
}

std::vector<double> normalize_returns(std::span<const double> values, double min, double max) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(normalize_return(v, min, max));
  return out;
}

std::vector<double> tau_grid(int points) {
  if (points < 2) throw Error("tau_grid: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
  return out;
}

std::vector<double> performance_profile(std::span<const double> scores, std::span<const double> taus) {
  if (scores.empty()) throw Error("performance_profile: no scores");
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const auto above = std::count_if(scores.begin(), scores.end(), [tau](double s) { return s > tau; });
    out.push_back(static_cast<double>(above) / static_cast<double>(scores.size()));
  }
  return out;
}

std::vector<double> detrend(std::span<const double> values) {
  std::vector<double> out;
  for (std::size_t t = 0; t + 1 < values.size(); ++t) out.push_back(values[t + 1] - values[t]);
  return out;
}

double value_at_risk(std::span<const double> values, double quantile) {
  if (values.empty()) throw Error("value_at_risk: empty input");
  if (!(quantile > 0.0 && quantile <= 1.0)) throw Error("value_at_risk: quantile must lie in (0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double cvar_detrended(std::span<const double> grad_norms, double quantile) {
  if (grad_norms.size() < 2) throw Error("cvar_detrended: need at least two values");
  const std::vector<double> diffs = detrend(grad_norms);
  const double var = value_at_risk(diffs, quantile);
  double sum = 0.0;
  std::size_t count = 0;
  for (double d : diffs) {
    if (d >= var) {
      sum += d;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

MeanSe mean_standard_error(std::span<const double> values) {
  if (values.empty()) throw Error("mean_standard_error: empty input");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace emax::metrics
