#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/errors.hpp"

namespace uavslice {

struct ChannelParams {
  double tx_power_w = 1.0;
  double nearfield_pathloss_db = -38.4;
  double pathloss_exp = 2.1;
  double noise_w = 8e-13;
  double beamwidth_deg = 30.0;  // cone half-angle measured from nadir
  double mainlobe_gain = 1.0;
  double sidelobe_gain = 0.01;
  double assoc_threshold_db = 5.0;

  double nearfield_linear() const { return std::pow(10.0, nearfield_pathloss_db / 10.0); }

  void validate() const {
    if (!(tx_power_w > 0.0)) throw ConfigError("tx_power_w must be > 0");
    if (!(noise_w > 0.0)) throw ConfigError("noise_w must be > 0");
    if (!(pathloss_exp > 0.0)) throw ConfigError("pathloss_exp must be > 0");
    if (!(sidelobe_gain > 0.0 && sidelobe_gain < mainlobe_gain))
      throw ConfigError("gains must satisfy 0 < sidelobe_gain < mainlobe_gain");
    if (!(beamwidth_deg > 0.0 && beamwidth_deg < 90.0)) throw ConfigError("beamwidth_deg must be in (0, 90)");
  }
};

// Row of the SINR -> MCS table; covers [sinr_low_db, sinr_high_db).
struct McsEntry {
  double sinr_low_db;
  double sinr_high_db;
  int bits_per_symbol;
  double code_rate;

  friend bool operator==(const McsEntry&, const McsEntry&) = default;
};

inline constexpr int kMcsTableVersion = 1;
inline constexpr std::size_t kMcsRows = 10;

inline const std::vector<McsEntry>& default_mcs_table() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  static const std::vector<McsEntry> table = {
      {-inf, 5.2, 2, 0.5879},  {5.2, 6.1, 4, 0.3691},    {6.1, 7.55, 4, 0.4785},
      {7.55, 10.85, 4, 0.6016}, {10.85, 11.55, 4, 0.4551}, {11.55, 12.75, 6, 0.5537},
      {12.75, 14.55, 6, 0.6504}, {14.55, 18.15, 6, 0.7539}, {18.15, 19.25, 6, 0.8525},
      {19.25, inf, 6, 0.9257},
  };
  return table;
}

// Reads the versioned CSV form of the table:
//   # mcs_table v1
//   sinr_low_db,sinr_high_db,bits_per_symbol,code_rate
//   -inf,5.2,2,0.5879
inline std::vector<McsEntry> parse_mcs_table(std::istream& in) {
  std::vector<McsEntry> rows;
  std::string line;
  bool header_seen = false;
  int version = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tag, ver;
      meta >> tag >> ver;
      if (tag == "mcs_table" && ver.size() > 1 && ver[0] == 'v') version = std::stoi(ver.substr(1));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ConfigError("mcs table row needs 4 columns: " + line);
    auto num = [](const std::string& s) {
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
      return std::stod(s);
    };
    rows.push_back({num(cells[0]), num(cells[1]), std::stoi(cells[2]), num(cells[3])});
  }
  if (version != kMcsTableVersion) throw ConfigError("unsupported mcs table version");
  return rows;
}

inline std::vector<McsEntry> load_mcs_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open mcs table: " + path);
  return parse_mcs_table(in);
}

inline const McsEntry& mcs_entry(double sinr_db, const std::vector<McsEntry>& table = default_mcs_table()) {
  for (const auto& row : table)
    if (sinr_db >= row.sinr_low_db && sinr_db < row.sinr_high_db) return row;
  return table.back();
}

struct Mcs {
  int bits_per_symbol;
  double code_rate;
};

inline Mcs mcs_lookup(double sinr_db) {
  const auto& row = mcs_entry(sinr_db);
  return {row.bits_per_symbol, row.code_rate};
}

inline constexpr double kSymbolsPerPrb = 168.0;  // 12 subcarriers x 14 symbols
inline constexpr double kTtiSeconds = 0.001;
inline constexpr int kPrbsPerTti = 100;

inline double data_rate_bps(int bits_per_symbol, double code_rate, int prbs) {
  return kSymbolsPerPrb * (bits_per_symbol * code_rate * prbs) / kTtiSeconds;
}

inline double antenna_gain(Vec2 user_pos, const UavState& uav, const ChannelParams& params) {
  const double horizontal = std::sqrt(squared_distance(user_pos, uav.position));
  const double off_nadir_deg = std::atan2(horizontal, uav.height_m) * 180.0 / std::numbers::pi;
  return off_nadir_deg <= params.beamwidth_deg ? params.mainlobe_gain : params.sidelobe_gain;
}

// p * c * mu * (d^2 + h^2)^(-alpha/2), linear watts.
inline double received_power(Vec2 user_pos, const UavState& uav, const ChannelParams& params) {
  const double d2 = squared_distance(user_pos, uav.position) + uav.height_m * uav.height_m;
  return params.tx_power_w * params.nearfield_linear() * antenna_gain(user_pos, uav, params) *
         std::pow(d2, -params.pathloss_exp / 2.0);
}

inline double sinr_from_powers(std::span<const double> powers, std::size_t serving, double noise_w) {
  double interference = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k)
    if (k != serving) interference += powers[k];
  return 10.0 * std::log10(powers[serving] / (interference + noise_w));
}

inline double sinr_db(Vec2 user_pos, std::size_t uav_index, std::span<const UavState> uavs, const ChannelParams& params) {
  std::vector<double> powers;
  powers.reserve(uavs.size());
  for (const auto& u : uavs) powers.push_back(received_power(user_pos, u, params));
  return sinr_from_powers(powers, uav_index, params.noise_w);
}

inline double sinr_db(const UserEquipment& user, std::size_t uav_index, const WorldState& world,
                      const ChannelParams& params) {
  return sinr_db(user.position, uav_index, world.uavs, params);
}

struct LinkReport {
  std::size_t user_id = 0;
  std::optional<std::size_t> serving_uav;
  double sinr_db = -std::numeric_limits<double>::infinity();
  int bits_per_symbol = 0;
  double code_rate = 0.0;
  double per_prb_bps = 0.0;
};

// Best-SINR association from per-UAV received powers; strict '>' keeps the
// lowest UAV id on ties.
inline LinkReport link_from_powers(std::size_t user_id, std::span<const double> powers, const ChannelParams& params) {
  LinkReport report;
  report.user_id = user_id;
  if (powers.empty()) return report;
  std::size_t best = 0;
  double best_sinr = sinr_from_powers(powers, 0, params.noise_w);
  for (std::size_t k = 1; k < powers.size(); ++k) {
    const double s = sinr_from_powers(powers, k, params.noise_w);
    if (s > best_sinr) {
      best_sinr = s;
      best = k;
    }
  }
  report.sinr_db = best_sinr;
  const Mcs mcs = mcs_lookup(best_sinr);
  report.bits_per_symbol = mcs.bits_per_symbol;
  report.code_rate = mcs.code_rate;
  report.per_prb_bps = data_rate_bps(mcs.bits_per_symbol, mcs.code_rate, 1);
  if (best_sinr >= params.assoc_threshold_db) report.serving_uav = best;
  return report;
}

inline std::vector<LinkReport> associate(const WorldState& world, const ChannelParams& params) {
  std::vector<LinkReport> links;
  links.reserve(world.users.size());
  std::vector<double> powers(world.uavs.size());
  for (const auto& user : world.users) {
    for (std::size_t k = 0; k < world.uavs.size(); ++k) powers[k] = received_power(user.position, world.uavs[k], params);
    links.push_back(link_from_powers(user.id, powers, params));
  }
  return links;
}

}  // namespace uavslice
