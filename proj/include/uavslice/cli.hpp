#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uavslice/baselines.hpp"
#include "uavslice/config.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/learn/checkpoint.hpp"
#include "uavslice/learn/trainer.hpp"
#include "uavslice/metrics.hpp"
#include "uavslice/oracle.hpp"
#include "uavslice/rollout.hpp"

namespace uavslice::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Episodes whose UAV trajectories are written to trajectories.csv.
inline constexpr int kTrajectoryEpisodes = 3;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
  std::optional<int> uavs;
  std::optional<int> episodes;
  std::optional<std::string> policy;
  std::optional<std::string> out;
  std::optional<std::string> checkpoint;
  std::string metrics_dir;  // plotdata input, defaults to --out
};

inline RunConfig resolve_config(const Options& opt, const std::string& subcommand) {
  RunConfig cfg;
  if (!opt.config_path.empty()) apply_config_file(cfg, opt.config_path);
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opt.seed) cfg.arena.seed = *opt.seed;
  if (opt.uavs) cfg.arena.uav_count = *opt.uavs;
  if (opt.episodes) {
    if (subcommand == "train")
      cfg.train.episodes = *opt.episodes;
    else
      cfg.train.eval_episodes = *opt.episodes;
  }
  if (opt.policy) cfg.policy = *opt.policy;
  if (opt.out) cfg.out_dir = *opt.out;
  if (opt.checkpoint) cfg.checkpoint = *opt.checkpoint;
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir))
    throw ConfigError("output directory not writable: " + cfg.out_dir);
  return cfg;
}

inline std::string run_id(const std::string& subcommand, const RunConfig& cfg) {
  return subcommand + "-seed" + std::to_string(cfg.seed()) + "-uavs" + std::to_string(cfg.arena.uav_count);
}

inline void write_manifest(const RunConfig& cfg, const std::string& subcommand) {
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "manifest.txt");
  if (!out) throw RuntimeError("cannot write manifest in " + cfg.out_dir);
  out << "# uavslice run manifest\n"
      << "subcommand=" << subcommand << "\n"
      << "mcs_table_version=" << kMcsTableVersion << "\n"
      << manifest_text(cfg);
}

inline RolloutSpec rollout_spec(const RunConfig& cfg) {
  RolloutSpec spec;
  spec.arena = cfg.arena;
  spec.channel = cfg.channel;
  spec.steps = cfg.train.steps_per_episode;
  return spec;
}

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Runs `policy` on the shared evaluation worlds, streaming per-episode rows.
inline SummaryRow evaluate_into(Policy& policy, const RunConfig& cfg, const std::string& id, CsvFile& rewards,
                                CsvFile& timing, CsvFile* trajectories) {
  RolloutSpec spec = rollout_spec(cfg);
  std::vector<double> episode_rewards;
  Stopwatch clock;
  for (int e = 0; e < cfg.train.eval_episodes; ++e) {
    Rng wr = eval_world_rng(cfg.seed(), static_cast<std::size_t>(e));
    Rng pr = eval_policy_rng(cfg.seed(), static_cast<std::size_t>(e));
    spec.record_trajectory = trajectories != nullptr && e < kTrajectoryEpisodes;
    const auto res = run_episode(spec, policy, wr, pr);
    episode_rewards.push_back(res.reward);
    rewards.row(to_csv(MetricsRow{id, policy.name(), cfg.arena.uav_count, e, res.reward, std::nullopt}));
    timing.row(id + "," + policy.name() + "," + std::to_string(e) + "," + format_number(clock.lap_ms()));
    if (spec.record_trajectory)
      for (std::size_t t = 0; t < res.trajectory.size(); ++t)
        for (std::size_t b = 0; b < res.trajectory[t].size(); ++b)
          trajectories->row(id + "," + policy.name() + "," + std::to_string(e) + "," + std::to_string(t) + "," +
                            std::to_string(b) + "," + format_number(res.trajectory[t][b].x) + "," +
                            format_number(res.trajectory[t][b].y));
  }
  return {id, policy.name(), cfg.arena.uav_count, cfg.train.eval_episodes, mean_ci95(episode_rewards)};
}

inline std::filesystem::path checkpoint_path(const RunConfig& cfg) {
  return cfg.checkpoint.empty() ? std::filesystem::path(cfg.out_dir) / "checkpoint.txt"
                                : std::filesystem::path(cfg.checkpoint);
}

inline void print_summary(std::ostream& out, const SummaryRow& s) {
  out << s.policy << ": mean " << format_number(s.stats.mean) << " (95% CI " << format_number(s.stats.ci_low) << " .. "
      << format_number(s.stats.ci_high) << ") over " << s.episodes << " episodes\n";
}

inline int cmd_train(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  write_manifest(cfg, "train");
  const std::string id = run_id("train", cfg);
  CsvFile rewards(dir / "rewards.csv", kRewardsHeader);
  CsvFile timing(dir / "timing.csv", kTimingHeader);
  Stopwatch clock;
  auto result = learn::train(cfg.arena, cfg.channel, cfg.train, cfg.seed(), [&](const learn::EpisodeLog& ep) {
    rewards.row(to_csv(MetricsRow{id, "dqn", cfg.arena.uav_count, ep.episode, ep.reward, ep.epsilon}));
    timing.row(id + ",dqn," + std::to_string(ep.episode) + "," + format_number(clock.lap_ms()));
  });
  learn::LearnedPolicy policy(result.agents);
  learn::save_checkpoint(checkpoint_path(cfg).string(), policy);

  CsvFile eval_rewards(dir / "eval_rewards.csv", kRewardsHeader);
  CsvFile eval_timing(dir / "eval_timing.csv", kTimingHeader);
  const auto summary = evaluate_into(policy, cfg, run_id("eval", cfg), eval_rewards, eval_timing, nullptr);
  CsvFile summary_file(dir / "summary.csv", kSummaryHeader);
  summary_file.row(to_csv(summary));
  print_summary(log, summary);
  return kExitOk;
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  auto policy = learn::load_checkpoint(checkpoint_path(cfg).string());
  if (policy.fleet_size() != static_cast<std::size_t>(cfg.arena.uav_count))
    throw ConfigError("checkpoint holds " + std::to_string(policy.fleet_size()) + " UAVs but uavs=" +
                      std::to_string(cfg.arena.uav_count));
  write_manifest(cfg, "eval");
  const std::string id = run_id("eval", cfg);
  CsvFile rewards(dir / "rewards.csv", kRewardsHeader);
  CsvFile timing(dir / "timing.csv", kTimingHeader);
  CsvFile traj(dir / "trajectories.csv", "run_id,policy,episode,step,uav,x,y");
  const auto summary = evaluate_into(policy, cfg, id, rewards, timing, &traj);
  CsvFile summary_file(dir / "summary.csv", kSummaryHeader);
  summary_file.row(to_csv(summary));
  print_summary(log, summary);
  return kExitOk;
}

inline std::vector<std::unique_ptr<Policy>> selected_baselines(const RunConfig& cfg) {
  std::vector<std::unique_ptr<Policy>> out;
  for (HeuristicKind k : kAllHeuristics) {
    if (cfg.policy != "all" && cfg.policy != heuristic_name(k)) continue;
    if (k == HeuristicKind::Random)
      out.push_back(std::make_unique<RandomPolicy>(learn::kAllocBwStep));
    else
      out.push_back(std::make_unique<CentroidPolicy>(k, cfg.arena.slice_demands_bps, learn::kAllocBwStep, cfg.papoc_form));
  }
  return out;
}

inline int cmd_baseline(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  write_manifest(cfg, "baseline");
  const std::string id = run_id("baseline", cfg);
  CsvFile rewards(dir / "rewards.csv", kRewardsHeader);
  CsvFile timing(dir / "timing.csv", kTimingHeader);
  CsvFile traj(dir / "trajectories.csv", "run_id,policy,episode,step,uav,x,y");
  CsvFile summary_file(dir / "summary.csv", kSummaryHeader);
  for (auto& policy : selected_baselines(cfg)) {
    const auto summary = evaluate_into(*policy, cfg, id, rewards, timing, &traj);
    summary_file.row(to_csv(summary));
    print_summary(log, summary);
  }
  return kExitOk;
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  write_manifest(cfg, "oracle");
  const std::string id = run_id("oracle", cfg);
  CsvFile rewards(dir / "rewards.csv", kRewardsHeader);
  CsvFile timing(dir / "timing.csv", kTimingHeader);
  CsvFile solutions(dir / "oracle.csv", "run_id,episode,uav,x,y,bw_em,bw_ur,bw_mm,objective,evaluations,exact");
  OraclePolicy policy(cfg.channel, cfg.oracle);
  RolloutSpec spec = rollout_spec(cfg);
  std::vector<double> episode_rewards;
  Stopwatch clock;
  for (int e = 0; e < cfg.train.eval_episodes; ++e) {
    Rng wr = eval_world_rng(cfg.seed(), static_cast<std::size_t>(e));
    Rng pr = eval_policy_rng(cfg.seed(), static_cast<std::size_t>(e));
    const auto res = run_episode(spec, policy, wr, pr);
    const auto& sol = policy.last_solution();
    for (std::size_t b = 0; b < sol.positions.size(); ++b)
      solutions.row(id + "," + std::to_string(e) + "," + std::to_string(b) + "," + format_number(sol.positions[b].x) + "," +
                    format_number(sol.positions[b].y) + "," + format_number(sol.splits[b].em) + "," +
                    format_number(sol.splits[b].ur) + "," + format_number(sol.splits[b].mm) + "," +
                    std::to_string(sol.objective) + "," + std::to_string(sol.evaluations) + "," +
                    (sol.exact ? "1" : "0"));
    episode_rewards.push_back(res.reward);
    rewards.row(to_csv(MetricsRow{id, kOptimalPolicy, cfg.arena.uav_count, e, res.reward, std::nullopt}));
    timing.row(id + "," + kOptimalPolicy + "," + std::to_string(e) + "," + format_number(clock.lap_ms()));
  }
  const SummaryRow summary{id, kOptimalPolicy, cfg.arena.uav_count, cfg.train.eval_episodes, mean_ci95(episode_rewards)};
  CsvFile summary_file(dir / "summary.csv", kSummaryHeader);
  summary_file.row(to_csv(summary));
  print_summary(log, summary);
  return kExitOk;
}

inline int cmd_plotdata(const RunConfig& cfg, const Options& opt, std::ostream& log, std::ostream& err) {
  const std::filesystem::path metrics = opt.metrics_dir.empty() ? cfg.out_dir : opt.metrics_dir;
  const auto report =
      emit_plot_data(metrics, cfg.out_dir, cfg.arena.uav_count, static_cast<std::size_t>(cfg.smoothing_window));
  for (const auto& m : report.missing_policies) err << "plotdata: no data for policy '" << m << "'\n";
  log << "fig4.csv: " << report.fig4_rows << " rows, fig5.csv: " << report.fig5_rows << " rows\n";
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"UAV base-station slicing simulator and learners"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key=value configuration file");
    sub->add_option("--set", opt.overrides, "override one config key (key=value); repeatable");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--uavs", opt.uavs, "fleet size (= number of user clusters)");
    sub->add_option("--episodes", opt.episodes, "training episodes (train) or evaluation episodes (others)");
    sub->add_option("--policy", opt.policy, "baseline policy: random | rapoc | papoc | all");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--checkpoint", opt.checkpoint, "checkpoint file (default <out>/checkpoint.txt)");
  };
  auto* train = app.add_subcommand("train", "train the dual-DQN fleet, save a checkpoint, evaluate greedily");
  auto* eval = app.add_subcommand("eval", "evaluate a saved checkpoint greedily");
  auto* baseline = app.add_subcommand("baseline", "evaluate heuristic baselines");
  auto* oracle = app.add_subcommand("oracle", "exhaustive genie-aided bound on the evaluation worlds");
  auto* plotdata = app.add_subcommand("plotdata", "write fig4.csv and fig5.csv from metrics");
  for (auto* sub : {train, eval, baseline, oracle, plotdata}) add_common(sub);
  plotdata->add_option("--metrics", opt.metrics_dir, "directory searched for rewards.csv/summary.csv (default --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = resolve_config(opt, name);
    if (name == "train") return cmd_train(cfg, log);
    if (name == "eval") return cmd_eval(cfg, log);
    if (name == "baseline") return cmd_baseline(cfg, log);
    if (name == "oracle") return cmd_oracle(cfg, log);
    return cmd_plotdata(cfg, opt, log, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace uavslice::cli
