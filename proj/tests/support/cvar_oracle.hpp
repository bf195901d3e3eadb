#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace emax::testing {

/// Sort-and-average reference: take the top (n - ceil(q n) + 1) detrended
/// values, extend through ties with the smallest of them, and average.
inline double cvar_oracle(const std::vector<double>& seq, double q = 0.95) {
  std::vector<double> diffs;
  for (std::size_t i = 1; i < seq.size(); ++i) diffs.push_back(seq[i] - seq[i - 1]);
  std::sort(diffs.begin(), diffs.end(), std::greater<>());
  const auto n = diffs.size();
  const auto keep = n - static_cast<std::size_t>(std::ceil(q * static_cast<double>(n))) + 1;
  const double cut = diffs[keep - 1];
  double sum = 0.0;
  int count = 0;
  for (double d : diffs) {
    if (d < cut) break;
    sum += d;
    ++count;
  }
  return sum / count;
}

/// Forty gradient norms alternating between zero and a spike.
inline std::vector<double> crafted_grad_norms() {
  const double spikes[] = {1, 5, 2, 7, 3, 9, 4, 6, 8, 10, 1, 5, 2, 7, 3, 9, 4, 6, 8, 11};
  std::vector<double> seq;
  for (double s : spikes) {
    seq.push_back(0.0);
    seq.push_back(s);
  }
  return seq;
}

}  // namespace emax::testing
