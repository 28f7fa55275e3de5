#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uavslice/config.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/stats.hpp"

namespace uavslice {

inline constexpr const char* kRewardsHeader = "run_id,policy,fleet_size,episode,reward,epsilon";
inline constexpr const char* kSummaryHeader = "run_id,policy,fleet_size,episodes,mean,ci_low,ci_high";
inline constexpr const char* kTimingHeader = "run_id,policy,episode,wall_ms";

struct MetricsRow {
  std::string run_id;
  std::string policy;
  int fleet_size = 0;
  int episode = 0;
  double reward = 0.0;
  std::optional<double> epsilon;  // blank for policies without exploration
};

struct SummaryRow {
  std::string run_id;
  std::string policy;
  int fleet_size = 0;
  int episodes = 0;
  MeanCi stats;
};

inline std::string to_csv(const MetricsRow& r) {
  return r.run_id + "," + r.policy + "," + std::to_string(r.fleet_size) + "," + std::to_string(r.episode) + "," +
         format_number(r.reward) + "," + (r.epsilon ? format_number(*r.epsilon) : "");
}

inline std::string to_csv(const SummaryRow& r) {
  return r.run_id + "," + r.policy + "," + std::to_string(r.fleet_size) + "," + std::to_string(r.episodes) + "," +
         format_number(r.stats.mean) + "," + format_number(r.stats.ci_low) + "," + format_number(r.stats.ci_high);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Line-oriented writer that flushes each row, so partial runs keep their data.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw RuntimeError("cannot open " + path.string() + " for writing");
    row(header);
  }

  void row(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw RuntimeError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw RuntimeError(path.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split_csv_line(line));
  return rows;
}

inline std::vector<MetricsRow> read_rewards(const std::filesystem::path& path) {
  std::vector<MetricsRow> out;
  for (const auto& c : read_csv(path, kRewardsHeader)) {
    if (c.size() != 6) throw RuntimeError(path.string() + ": malformed rewards row");
    MetricsRow r{c[0], c[1], std::stoi(c[2]), std::stoi(c[3]), std::stod(c[4]), std::nullopt};
    if (!c[5].empty()) r.epsilon = std::stod(c[5]);
    out.push_back(r);
  }
  return out;
}

inline std::vector<SummaryRow> read_summary(const std::filesystem::path& path) {
  std::vector<SummaryRow> out;
  for (const auto& c : read_csv(path, kSummaryHeader)) {
    if (c.size() != 7) throw RuntimeError(path.string() + ": malformed summary row");
    SummaryRow r{c[0], c[1], std::stoi(c[2]), std::stoi(c[3]), {}};
    r.stats.mean = std::stod(c[4]);
    r.stats.ci_low = std::stod(c[5]);
    r.stats.ci_high = std::stod(c[6]);
    out.push_back(r);
  }
  return out;
}

// Files named `name` anywhere below `dir`, in sorted path order.
inline std::vector<std::filesystem::path> find_files(const std::filesystem::path& dir, const std::string& name) {
  std::vector<std::filesystem::path> found;
  if (!std::filesystem::exists(dir)) return found;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == name) found.push_back(entry.path());
  std::sort(found.begin(), found.end());
  return found;
}

inline constexpr std::array<const char*, 4> kPlotPolicies = {"dqn", "random", "rapoc", "papoc"};
inline constexpr const char* kOptimalPolicy = "optimal";

struct PlotDataReport {
  std::vector<std::string> missing_policies;  // expected in fig4 but absent
  int fig4_rows = 0;
  int fig5_rows = 0;
};

// fig4.csv: per-episode trailing-mean reward per policy for one fleet size,
// plus the optimal-bound horizontal. The learner's series comes from training
// runs (run ids starting with "train"); other policies from evaluation runs.
// fig5.csv: fleet x policy x mean x CI from every summary found.
inline PlotDataReport emit_plot_data(const std::filesystem::path& metrics_dir, const std::filesystem::path& out_dir,
                                     int fleet, std::size_t window) {
  const auto reward_files = find_files(metrics_dir, "rewards.csv");
  const auto summary_files = find_files(metrics_dir, "summary.csv");
  if (reward_files.empty() && summary_files.empty())
    throw RuntimeError("no rewards.csv or summary.csv under " + metrics_dir.string());

  std::map<std::string, std::vector<std::pair<int, double>>> series;
  for (const auto& f : reward_files)
    for (const auto& r : read_rewards(f)) {
      if (r.fleet_size != fleet) continue;
      const bool training = r.run_id.rfind("train", 0) == 0;
      if (r.policy == "dqn" && !training) continue;
      series[r.policy].push_back({r.episode, r.reward});
    }

  std::vector<SummaryRow> summaries;
  for (const auto& f : summary_files)
    for (auto& s : read_summary(f)) summaries.push_back(std::move(s));

  std::optional<double> optimal;
  for (const auto& s : summaries)
    if (s.fleet_size == fleet && s.policy == kOptimalPolicy) optimal = s.stats.mean;

  PlotDataReport report;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> smoothed;
  std::size_t length = 0;
  for (const char* p : kPlotPolicies) {
    auto it = series.find(p);
    if (it == series.end()) {
      report.missing_policies.push_back(p);
      continue;
    }
    auto pts = it->second;
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> values;
    for (const auto& [ep, v] : pts) values.push_back(v);
    columns.push_back(p);
    smoothed.push_back(trailing_mean(values, window));
    length = std::max(length, values.size());
  }
  if (!optimal) report.missing_policies.push_back(kOptimalPolicy);

  std::filesystem::create_directories(out_dir);
  {
    std::string header = "episode";
    for (const auto& c : columns) header += "," + c;
    header += ",optimal";
    CsvFile fig4(out_dir / "fig4.csv", header);
    for (std::size_t i = 0; i < length; ++i) {
      std::string line = std::to_string(i);
      for (const auto& s : smoothed) line += "," + (i < s.size() ? format_number(s[i]) : std::string());
      line += "," + (optimal ? format_number(*optimal) : std::string());
      fig4.row(line);
      ++report.fig4_rows;
    }
  }
  {
    std::ofstream side(out_dir / "fig4.columns.txt");
    side << "# fig4.csv: achieved reward per episode, fleet size " << fleet << "\n"
         << "episode: episode index from 0\n";
    for (const auto& c : columns)
      side << c << ": trailing " << window << "-episode mean of cumulative episode reward\n";
    side << "optimal: mean genie-aided episode reward (constant), blank if no oracle summary\n";
    for (const auto& m : report.missing_policies) side << "missing: " << m << "\n";
  }

  std::stable_sort(summaries.begin(), summaries.end(), [](const SummaryRow& a, const SummaryRow& b) {
    if (a.fleet_size != b.fleet_size) return a.fleet_size < b.fleet_size;
    return a.policy < b.policy;
  });
  {
    CsvFile fig5(out_dir / "fig5.csv", "fleet_size,policy,mean,ci_low,ci_high");
    for (const auto& s : summaries) {
      fig5.row(std::to_string(s.fleet_size) + "," + s.policy + "," + format_number(s.stats.mean) + "," +
               format_number(s.stats.ci_low) + "," + format_number(s.stats.ci_high));
      ++report.fig5_rows;
    }
  }
  {
    std::ofstream side(out_dir / "fig5.columns.txt");
    side << "# fig5.csv: evaluation reward per fleet size and policy\n"
         << "fleet_size: number of UAVs (= clusters)\n"
         << "policy: dqn | random | rapoc | papoc | optimal\n"
         << "mean: mean cumulative episode reward over evaluation episodes\n"
         << "ci_low, ci_high: normal-approximation 95% confidence interval\n";
  }
  return report;
}

}  // namespace uavslice
