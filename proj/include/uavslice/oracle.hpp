#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/slicing.hpp"

namespace uavslice {

struct OracleConfig {
  int grid_points_per_axis = 8;
  double bw_step = 0.1;
  int max_uavs_exact = 2;
  std::uint64_t max_placements = 20'000'000;

  void validate() const {
    if (grid_points_per_axis < 2) throw ConfigError("oracle grid_points_per_axis must be >= 2");
    simplex_grid(bw_step);
    if (max_uavs_exact < 1) throw ConfigError("oracle max_uavs_exact must be >= 1");
  }
};

struct OracleSolution {
  std::vector<Vec2> positions;
  std::vector<BandwidthSplit> splits;
  int objective = 0;
  std::uint64_t evaluations = 0;  // (placement, UAV, split) candidates scored
  bool exact = true;
};

// Uniform lattice including the arena edges; index = ix * n + iy.
inline std::vector<Vec2> placement_lattice(double side, int n) {
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(n * n));
  const double spacing = side / static_cast<double>(n - 1);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) points.push_back({ix * spacing, iy * spacing});
  return points;
}

inline std::size_t nearest_lattice_index(Vec2 p, double side, int n) {
  const double spacing = side / static_cast<double>(n - 1);
  auto snap = [&](double v) {
    const long i = std::lround(v / spacing);
    return static_cast<std::size_t>(std::clamp<long>(i, 0, n - 1));
  };
  return snap(p.x) * static_cast<std::size_t>(n) + snap(p.y);
}

// Satisfied users of one UAV for every PRB budget of every slice, given the
// set of users it serves.
class SliceSatisfactionTable {
 public:
  void build(const WorldState& world, std::span<const LinkReport> links, std::size_t uav) {
    for (auto& ids : members_) ids.clear();
    for (std::size_t g = 0; g < world.users.size(); ++g)
      if (links[g].serving_uav == uav) members_[index_of(world.users[g].slice)].push_back(g);
    for (std::size_t s = 0; s < kSliceCount; ++s) {
      const auto& ids = members_[s];
      for (int prbs = 0; prbs <= kPrbsPerTti; ++prbs) {
        int count = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const auto& link = links[ids[i]];
          const int share = round_robin_share(prbs, ids.size(), i);
          if (meets_sla(data_rate_bps(link.bits_per_symbol, link.code_rate, share), world.users[ids[i]].demand_bps))
            ++count;
        }
        table_[s][static_cast<std::size_t>(prbs)] = count;
      }
    }
  }

  int satisfied(const PrbBudget& budget) const {
    int total = 0;
    for (std::size_t s = 0; s < kSliceCount; ++s) total += table_[s][static_cast<std::size_t>(budget[s])];
    return total;
  }

 private:
  std::array<std::vector<std::size_t>, kSliceCount> members_;
  std::array<std::array<int, kPrbsPerTti + 1>, kSliceCount> table_{};
};

namespace detail {

struct OracleWorkspace {
  const WorldState& world;
  const ChannelParams& params;
  std::vector<Vec2> lattice;
  std::vector<BandwidthSplit> simplex;
  std::vector<PrbBudget> budgets;
  // power[(b * points + p) * users + g]
  std::vector<double> power;
  std::size_t points = 0;
  std::size_t users = 0;
  std::uint64_t evaluations = 0;

  OracleWorkspace(const WorldState& w, const ChannelParams& cp, const OracleConfig& cfg) : world(w), params(cp) {
    lattice = placement_lattice(w.arena_side_m, cfg.grid_points_per_axis);
    simplex = simplex_grid(cfg.bw_step);
    for (const auto& s : simplex) budgets.push_back(prb_partition(s));
    points = lattice.size();
    users = w.users.size();
    power.resize(w.uavs.size() * points * users);
    for (std::size_t b = 0; b < w.uavs.size(); ++b)
      for (std::size_t p = 0; p < points; ++p) {
        UavState probe = w.uavs[b];
        probe.position = lattice[p];
        for (std::size_t g = 0; g < users; ++g)
          power[(b * points + p) * users + g] = received_power(w.users[g].position, probe, params);
      }
  }

  // Objective of a placement with each UAV's best split; first best split in
  // simplex order wins.
  int score(std::span<const std::size_t> placement, std::vector<std::size_t>* best_splits) {
    const std::size_t n_uavs = placement.size();
    std::vector<LinkReport> links(users);
    std::vector<double> pw(n_uavs);
    for (std::size_t g = 0; g < users; ++g) {
      for (std::size_t b = 0; b < n_uavs; ++b) pw[b] = power[(b * points + placement[b]) * users + g];
      links[g] = link_from_powers(world.users[g].id, pw, params);
    }
    int total = 0;
    SliceSatisfactionTable table;
    if (best_splits) best_splits->assign(n_uavs, 0);
    for (std::size_t b = 0; b < n_uavs; ++b) {
      table.build(world, links, b);
      int best = -1;
      for (std::size_t k = 0; k < budgets.size(); ++k) {
        const int v = table.satisfied(budgets[k]);
        if (v > best) {
          best = v;
          if (best_splits) (*best_splits)[b] = k;
        }
      }
      evaluations += budgets.size();
      total += best;
    }
    return total;
  }
};

}  // namespace detail

// Maximizes the number of satisfied users over lattice placements x simplex
// splits. Exact for fleets up to max_uavs_exact; larger fleets use per-UAV
// coordinate ascent from centroid-snapped starts and report exact = false.
inline OracleSolution solve_oracle(const WorldState& world, const ChannelParams& params, const OracleConfig& cfg,
                                   std::span<const Vec2> ascent_start = {}) {
  cfg.validate();
  const std::size_t n_uavs = world.uavs.size();
  OracleSolution sol;
  if (n_uavs == 0) return sol;
  detail::OracleWorkspace ws(world, params, cfg);
  const std::size_t points = ws.points;

  std::vector<std::size_t> best_place(n_uavs, 0);
  std::vector<std::size_t> best_split(n_uavs, 0);
  int best = -1;

  if (static_cast<int>(n_uavs) <= cfg.max_uavs_exact) {
    double combos = std::pow(static_cast<double>(points), static_cast<double>(n_uavs));
    if (combos > static_cast<double>(cfg.max_placements))
      throw SearchSpaceTooLarge("oracle search space of " + std::to_string(static_cast<std::uint64_t>(combos)) +
                                " placements exceeds budget; coarsen the grid");
    std::vector<std::size_t> place(n_uavs, 0);
    std::vector<std::size_t> splits;
    // Odometer with UAV 0 as the slowest digit.
    while (true) {
      const int v = ws.score(place, &splits);
      if (v > best) {
        best = v;
        best_place = place;
        best_split = splits;
      }
      std::size_t d = n_uavs;
      while (d > 0) {
        --d;
        if (++place[d] < points) break;
        place[d] = 0;
        if (d == 0) {
          d = n_uavs + 1;
          break;
        }
      }
      if (d == n_uavs + 1) break;
    }
    sol.exact = true;
  } else {
    std::vector<std::size_t> place(n_uavs);
    for (std::size_t b = 0; b < n_uavs; ++b) {
      const Vec2 start = b < ascent_start.size() ? ascent_start[b] : world.uavs[b].position;
      place[b] = nearest_lattice_index(start, world.arena_side_m, cfg.grid_points_per_axis);
    }
    std::vector<std::size_t> splits;
    best = ws.score(place, &splits);
    best_place = place;
    best_split = splits;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t b = 0; b < n_uavs; ++b) {
        place = best_place;
        for (std::size_t p = 0; p < points; ++p) {
          place[b] = p;
          const int v = ws.score(place, &splits);
          if (v > best) {
            best = v;
            best_place = place;
            best_split = splits;
            improved = true;
          }
        }
      }
    }
    sol.exact = false;
  }

  sol.objective = best;
  sol.evaluations = ws.evaluations;
  for (std::size_t b = 0; b < n_uavs; ++b) {
    sol.positions.push_back(ws.lattice[best_place[b]]);
    sol.splits.push_back(ws.simplex[best_split[b]]);
  }
  return sol;
}

// Places the UAVs, re-associates and counts satisfied users.
inline int score_configuration(const WorldState& world, std::span<const Vec2> positions,
                               std::span<const BandwidthSplit> splits, const ChannelParams& params) {
  WorldState placed = world;
  for (std::size_t b = 0; b < placed.uavs.size(); ++b) placed.uavs[b].position = positions[b];
  const auto links = associate(placed, params);
  return evaluate(placed, splits, links).total_reward();
}

}  // namespace uavslice
