#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace emax::harness {

struct MetricRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string task;
  std::string algorithm;
  std::int64_t step = 0;
  std::string metric;
  double value = 0.0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

inline constexpr const char* kCsvHeader = "run_id,seed,task,algorithm,step,metric,value";

/// Shortest decimal form that parses back to the same double.
std::string format_value(double v);

/// Append-only CSV writer. Comment lines (prefixed "# ") precede the header.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, const std::string& comment_block);

  void write(const MetricRecord& r);
  void comment(const std::string& text);
  void flush() { out_.flush(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct MetricsFile {
  /// Comment lines with the "# " prefix removed.
  std::vector<std::string> comments;
  std::vector<MetricRecord> records;
};

MetricsFile read_metrics(const std::filesystem::path& path);
MetricsFile parse_metrics(const std::string& text);

}  // namespace emax::harness
