#pragma once

#include "emax/harness/metrics_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace emax::harness {

/// Every metrics CSV below `dir`, recursively, in path order.
std::vector<MetricRecord> collect_metrics(const std::filesystem::path& dir);

/// Aggregated CSV-style tables: final-return IQM with bootstrap CIs per task
/// and algorithm, normalised IQM and performance profiles per algorithm, and
/// the CVaR of detrended gradient norms per task with the cross-task mean
/// and standard error.
std::string metrics_report(const std::vector<MetricRecord>& records, std::uint64_t bootstrap_seed = 0,
                           int resamples = 2000, int profile_points = 21);

}  // namespace emax::harness
