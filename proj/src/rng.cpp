#include "emax/rng.hpp"

namespace emax {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Rng make_stream(std::uint64_t master_seed, std::string_view name) {
  const std::uint64_t tag = fnv1a(name);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double normal(Rng& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw Error("uniform_index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

std::size_t argmax_random_tie(std::span<const double> values, Rng& rng) {
  if (values.empty()) throw Error("argmax: empty input");
  Eigen::Map<const Eigen::RowVectorXd> row(values.data(), static_cast<Index>(values.size()));
  return argmax_random_tie(row, rng);
}

}  // namespace emax
