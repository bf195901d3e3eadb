#include "emax/harness/report.hpp"

#include "emax/metrics.hpp"
#include "emax/rng.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace emax::harness {

namespace {

using RunKey = std::tuple<std::string, std::uint64_t>;  // run_id, seed

struct RunSeries {
  std::string task;
  std::string algorithm;
  std::vector<std::pair<std::int64_t, double>> eval;
  std::vector<double> grad_norms;
};

}  // namespace

std::vector<MetricRecord> collect_metrics(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("metrics: not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<MetricRecord> out;
  for (const auto& f : files) {
    MetricsFile m = read_metrics(f);
    out.insert(out.end(), m.records.begin(), m.records.end());
  }
  return out;
}

std::string metrics_report(const std::vector<MetricRecord>& records, std::uint64_t bootstrap_seed, int resamples,
                           int profile_points) {
  std::map<RunKey, RunSeries> runs;
  for (const MetricRecord& r : records) {
    RunSeries& s = runs[{r.run_id, r.seed}];
    s.task = r.task;
    s.algorithm = r.algorithm;
    if (r.metric == "eval_return") s.eval.emplace_back(r.step, r.value);
    else if (r.metric == "grad_norm") s.grad_norms.push_back(r.value);
  }

  // Final returns per (task, algorithm), plus per-task extremes for normalisation.
  std::map<std::pair<std::string, std::string>, std::vector<double>> finals;
  std::map<std::string, std::pair<double, double>> extremes;
  for (auto& [key, s] : runs) {
    if (s.eval.empty()) continue;
    std::stable_sort(s.eval.begin(), s.eval.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    finals[{s.task, s.algorithm}].push_back(s.eval.back().second);
    auto [it, fresh] = extremes.try_emplace(s.task, std::numeric_limits<double>::infinity(),
                                            -std::numeric_limits<double>::infinity());
    for (const auto& [step, v] : s.eval) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }

  Rng rng = make_stream(bootstrap_seed, "report/bootstrap");
  std::ostringstream os;
  os << "# final evaluation returns\n";
  os << "task,algorithm,runs,iqm,ci_low,ci_high\n";
  for (const auto& [key, values] : finals) {
    const metrics::Interval ci = metrics::bootstrap_ci(values, rng, resamples);
    os << key.first << ',' << key.second << ',' << values.size() << ',' << format_value(metrics::iqm(values)) << ','
       << format_value(ci.low) << ',' << format_value(ci.high) << '\n';
  }

  std::map<std::string, std::vector<double>> normalised;
  for (const auto& [key, values] : finals) {
    const auto [lo, hi] = extremes.at(key.first);
    for (double v : metrics::normalize_returns(values, lo, hi)) normalised[key.second].push_back(v);
  }
  os << "\n# normalised final returns across tasks\n";
  os << "algorithm,scores,iqm,ci_low,ci_high\n";
  for (const auto& [algo, scores] : normalised) {
    const metrics::Interval ci = metrics::bootstrap_ci(scores, rng, resamples);
    os << algo << ',' << scores.size() << ',' << format_value(metrics::iqm(scores)) << ',' << format_value(ci.low)
       << ',' << format_value(ci.high) << '\n';
  }

  os << "\n# performance profile\n";
  os << "algorithm,tau,fraction\n";
  const std::vector<double> taus = metrics::tau_grid(profile_points);
  for (const auto& [algo, scores] : normalised) {
    const std::vector<double> profile = metrics::performance_profile(scores, taus);
    for (std::size_t i = 0; i < taus.size(); ++i)
      os << algo << ',' << format_value(taus[i]) << ',' << format_value(profile[i]) << '\n';
  }

  std::map<std::pair<std::string, std::string>, std::vector<double>> cvars;
  for (const auto& [key, s] : runs)
    if (s.grad_norms.size() >= 2) cvars[{s.task, s.algorithm}].push_back(metrics::cvar_detrended(s.grad_norms));
  os << "\n# cvar of detrended gradient norms per task\n";
  os << "task,algorithm,runs,cvar\n";
  std::map<std::string, std::vector<double>> per_algo;
  for (const auto& [key, values] : cvars) {
    const double mean = metrics::mean_standard_error(values).mean;
    per_algo[key.second].push_back(mean);
    os << key.first << ',' << key.second << ',' << values.size() << ',' << format_value(mean) << '\n';
  }
  os << "\n# cvar across tasks\n";
  os << "algorithm,tasks,mean,standard_error\n";
  for (const auto& [algo, values] : per_algo) {
    const metrics::MeanSe ms = metrics::mean_standard_error(values);
    os << algo << ',' << values.size() << ',' << format_value(ms.mean) << ',' << format_value(ms.standard_error)
       << '\n';
  }
  return os.str();
}

}  // namespace emax::harness
