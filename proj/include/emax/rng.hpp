#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace emax {

/// Derives an independent engine for a named purpose from a master seed.
/// Streams never share state, so consuming one never shifts another.
Rng make_stream(std::uint64_t master_seed, std::string_view name);

double uniform01(Rng& rng);
double normal(Rng& rng, double mean, double stddev);
/// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);
bool bernoulli(Rng& rng, double p);

/// Index of a maximal element with uniform random tie-breaking.
std::size_t argmax_random_tie(std::span<const double> values, Rng& rng);

template <typename Derived>
std::size_t argmax_random_tie(const Eigen::DenseBase<Derived>& row, Rng& rng) {
  const auto n = static_cast<std::size_t>(row.size());
  double best = row(0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, static_cast<double>(row(static_cast<Index>(i))));
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += row(static_cast<Index>(i)) == best;
  std::size_t pick = count == 1 ? 0 : uniform_index(rng, count);
  for (std::size_t i = 0; i < n; ++i) {
    if (row(static_cast<Index>(i)) == best) {
      if (pick == 0) return i;
      --pick;
    }
  }
  return n - 1;
}

}  // namespace emax
