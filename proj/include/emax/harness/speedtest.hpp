#pragma once

#include "emax/harness/config.hpp"

#include <string>
#include <vector>

namespace emax::harness {

struct SpeedRow {
  std::string algorithm;
  /// 1 marks the baseline without ensemble machinery.
  int ensemble_size = 1;
  double seconds = 0.0;
  /// t_K / t_baseline - 1
  double relative_increase = 0.0;
};

/// Wall-clock time for `steps` training steps of the baseline and of the
/// EMAX variant for each ensemble size, averaged over `repeats`. Evaluation
/// is disabled while timing.
std::vector<SpeedRow> speed_benchmark(const ExperimentConfig& config, std::int64_t steps = 10000, int repeats = 10,
                                      const std::vector<int>& ensemble_sizes = {2, 5, 8});

std::string format_speed_table(const std::vector<SpeedRow>& rows);

}  // namespace emax::harness
