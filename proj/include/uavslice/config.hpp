#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "uavslice/baselines.hpp"
#include "uavslice/env.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/learn/dqn.hpp"
#include "uavslice/oracle.hpp"
#include "uavslice/radio.hpp"

namespace uavslice {

// Fixed 9-significant-digit text for every number written to disk.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct RunConfig {
  ArenaConfig arena;
  ChannelParams channel;
  learn::TrainConfig train;
  OracleConfig oracle;
  std::string out_dir = "out";
  std::string policy = "all";
  std::string checkpoint;  // empty: <out_dir>/checkpoint.txt
  ProportionalForm papoc_form = ProportionalForm::Aggregated;
  int smoothing_window = 50;

  std::uint64_t seed() const { return arena.seed; }

  void validate() const {
    arena.validate();
    channel.validate();
    train.validate();
    oracle.validate();
    if (policy != "all" && policy != "random" && policy != "rapoc" && policy != "papoc")
      throw ConfigError("policy must be one of random, rapoc, papoc, all (got '" + policy + "')");
    if (smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
    if (out_dir.empty()) throw ConfigError("output directory must not be empty");
  }
};

namespace config_detail {

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return d;
}

inline long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return i;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Field real_field(const std::string& key, Member member) {
  return {[key, member](RunConfig& c, const std::string& v) { member(c) = to_double(key, v); },
          [member](const RunConfig& c) { return format_number(member(c)); }};
}

template <typename Member>
Field int_field(const std::string& key, Member member) {
  return {[key, member](RunConfig& c, const std::string& v) {
            member(c) = static_cast<std::remove_cvref_t<decltype(member(c))>>(to_int(key, v));
          },
          [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

template <typename Member>
Field string_field(Member member) {
  return {[member](RunConfig& c, const std::string& v) { member(c) = v; },
          [member](const RunConfig& c) { return member(c); }};
}

// Key registry; std::map keeps manifest output sorted.
inline const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["uavs"] = int_field("uavs", [](auto& c) -> auto& { return c.arena.uav_count; });
    f["user_density"] = real_field("user_density", [](auto& c) -> auto& { return c.arena.user_density_per_km2; });
    f["uav_density"] = real_field("uav_density", [](auto& c) -> auto& { return c.arena.uav_density_per_km2; });
    f["uav_height_m"] = real_field("uav_height_m", [](auto& c) -> auto& { return c.arena.uav_height_m; });
    f["step_m"] = real_field("step_m", [](auto& c) -> auto& { return c.arena.step_m; });
    f["cluster_sigma_m"] = real_field("cluster_sigma_m", [](auto& c) -> auto& { return c.arena.cluster_sigma_m; });
    f["p_embb"] = real_field("p_embb", [](auto& c) -> auto& { return c.arena.slice_probs[0]; });
    f["p_urllc"] = real_field("p_urllc", [](auto& c) -> auto& { return c.arena.slice_probs[1]; });
    f["p_mmtc"] = real_field("p_mmtc", [](auto& c) -> auto& { return c.arena.slice_probs[2]; });
    f["dem_embb_bps"] = real_field("dem_embb_bps", [](auto& c) -> auto& { return c.arena.slice_demands_bps[0]; });
    f["dem_urllc_bps"] = real_field("dem_urllc_bps", [](auto& c) -> auto& { return c.arena.slice_demands_bps[1]; });
    f["dem_mmtc_bps"] = real_field("dem_mmtc_bps", [](auto& c) -> auto& { return c.arena.slice_demands_bps[2]; });
    f["seed"] = int_field("seed", [](auto& c) -> auto& { return c.arena.seed; });

    f["tx_power_w"] = real_field("tx_power_w", [](auto& c) -> auto& { return c.channel.tx_power_w; });
    f["nearfield_pathloss_db"] =
        real_field("nearfield_pathloss_db", [](auto& c) -> auto& { return c.channel.nearfield_pathloss_db; });
    f["pathloss_exp"] = real_field("pathloss_exp", [](auto& c) -> auto& { return c.channel.pathloss_exp; });
    f["noise_w"] = real_field("noise_w", [](auto& c) -> auto& { return c.channel.noise_w; });
    f["beamwidth_deg"] = real_field("beamwidth_deg", [](auto& c) -> auto& { return c.channel.beamwidth_deg; });
    f["mainlobe_gain"] = real_field("mainlobe_gain", [](auto& c) -> auto& { return c.channel.mainlobe_gain; });
    f["sidelobe_gain"] = real_field("sidelobe_gain", [](auto& c) -> auto& { return c.channel.sidelobe_gain; });
    f["assoc_threshold_db"] =
        real_field("assoc_threshold_db", [](auto& c) -> auto& { return c.channel.assoc_threshold_db; });

    f["episodes"] = int_field("episodes", [](auto& c) -> auto& { return c.train.episodes; });
    f["steps_per_episode"] = int_field("steps_per_episode", [](auto& c) -> auto& { return c.train.steps_per_episode; });
    f["eval_episodes"] = int_field("eval_episodes", [](auto& c) -> auto& { return c.train.eval_episodes; });
    f["gamma"] = real_field("gamma", [](auto& c) -> auto& { return c.train.gamma; });
    f["learning_rate"] = real_field("learning_rate", [](auto& c) -> auto& { return c.train.learning_rate; });
    f["epsilon_start"] = real_field("epsilon_start", [](auto& c) -> auto& { return c.train.epsilon_start; });
    f["epsilon_decay"] = real_field("epsilon_decay", [](auto& c) -> auto& { return c.train.epsilon_decay; });
    f["epsilon_min"] = real_field("epsilon_min", [](auto& c) -> auto& { return c.train.epsilon_min; });
    f["batch_size"] = int_field("batch_size", [](auto& c) -> auto& { return c.train.batch_size; });
    f["buffer_size"] = int_field("buffer_size", [](auto& c) -> auto& { return c.train.buffer_size; });
    f["target_sync_steps"] = int_field("target_sync_steps", [](auto& c) -> auto& { return c.train.target_sync_steps; });
    f["priority_alpha"] = real_field("priority_alpha", [](auto& c) -> auto& { return c.train.priority_alpha; });
    f["beta_start"] = real_field("beta_start", [](auto& c) -> auto& { return c.train.beta_start; });
    f["beta_end"] = real_field("beta_end", [](auto& c) -> auto& { return c.train.beta_end; });
    f["hidden"] = {[](RunConfig& c, const std::string& v) {
                     std::vector<int> dims;
                     std::stringstream ss(v);
                     for (std::string item; std::getline(ss, item, ',');)
                       dims.push_back(static_cast<int>(to_int("hidden", trim(item))));
                     if (dims.empty()) throw ConfigError("hidden: needs at least one layer size");
                     c.train.hidden = dims;
                   },
                   [](const RunConfig& c) {
                     std::string s;
                     for (std::size_t i = 0; i < c.train.hidden.size(); ++i)
                       s += (i ? "," : "") + std::to_string(c.train.hidden[i]);
                     return s;
                   }};

    f["oracle_grid"] = int_field("oracle_grid", [](auto& c) -> auto& { return c.oracle.grid_points_per_axis; });
    f["oracle_bw_step"] = real_field("oracle_bw_step", [](auto& c) -> auto& { return c.oracle.bw_step; });
    f["oracle_max_uavs_exact"] =
        int_field("oracle_max_uavs_exact", [](auto& c) -> auto& { return c.oracle.max_uavs_exact; });
    f["oracle_max_placements"] =
        int_field("oracle_max_placements", [](auto& c) -> auto& { return c.oracle.max_placements; });

    f["out"] = string_field([](auto& c) -> auto& { return c.out_dir; });
    f["policy"] = string_field([](auto& c) -> auto& { return c.policy; });
    f["checkpoint"] = string_field([](auto& c) -> auto& { return c.checkpoint; });
    f["papoc_form"] = {[](RunConfig& c, const std::string& v) {
                         if (v == "aggregated")
                           c.papoc_form = ProportionalForm::Aggregated;
                         else if (v == "per_user")
                           c.papoc_form = ProportionalForm::PerUser;
                         else
                           throw ConfigError("papoc_form must be aggregated or per_user");
                       },
                       [](const RunConfig& c) {
                         return std::string(c.papoc_form == ProportionalForm::Aggregated ? "aggregated" : "per_user");
                       }};
    f["smoothing_window"] = int_field("smoothing_window", [](auto& c) -> auto& { return c.smoothing_window; });
    return f;
  }();
  return table;
}

}  // namespace config_detail

inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = config_detail::fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, value);
}

// key=value lines; '#' starts a comment. Errors carry the line number.
inline void apply_config_text(RunConfig& cfg, std::istream& in, const std::string& source = "config") {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    const std::string key = config_detail::trim(line.substr(0, eq));
    const std::string value = config_detail::trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  apply_config_text(cfg, in);
  cfg.validate();
  return cfg;
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  apply_config_text(cfg, in, path);
}

// Resolved configuration as sorted key=value lines.
inline std::string manifest_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : config_detail::fields()) out += key + "=" + field.get(cfg) + "\n";
  return out;
}

}  // namespace uavslice
