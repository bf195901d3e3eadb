#include "emax/harness/metrics_io.hpp"

#include "emax/tensor.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace emax::harness {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw Error(std::string("metrics: ") + what + " must not contain commas or newlines: '" + s + "'");
}

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, const std::string& comment_block) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw Error("metrics: cannot write " + path.string());
  std::istringstream lines(comment_block);
  std::string line;
  while (std::getline(lines, line)) out_ << "# " << line << '\n';
  out_ << kCsvHeader << '\n';
}

void MetricsWriter::write(const MetricRecord& r) {
  check_field(r.run_id, "run_id");
  check_field(r.task, "task");
  check_field(r.algorithm, "algorithm");
  check_field(r.metric, "metric");
  out_ << r.run_id << ',' << r.seed << ',' << r.task << ',' << r.algorithm << ',' << r.step << ',' << r.metric << ','
       << format_value(r.value) << '\n';
}

void MetricsWriter::comment(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) out_ << "# " << line << '\n';
}

MetricsFile parse_metrics(const std::string& text) {
  MetricsFile file;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#", 0) == 0) {
      file.comments.push_back(line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header) {
      if (line != kCsvHeader) throw Error("metrics: line " + std::to_string(lineno) + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7) throw Error("metrics: line " + std::to_string(lineno) + ": expected 7 fields");
    MetricRecord r;
    r.run_id = f[0];
    r.task = f[2];
    r.algorithm = f[3];
    r.metric = f[5];
    try {
      std::size_t pos = 0;
      r.seed = std::stoull(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument("seed");
      r.step = std::stoll(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument("step");
      r.value = std::strtod(f[6].c_str(), nullptr);
      if (f[6].empty()) throw std::invalid_argument("value");
    } catch (const std::exception&) {
      throw Error("metrics: line " + std::to_string(lineno) + ": malformed number");
    }
    file.records.push_back(std::move(r));
  }
  if (!header) throw Error("metrics: missing header row");
  return file;
}

MetricsFile read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("metrics: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_metrics(buf.str());
}

}  // namespace emax::harness
