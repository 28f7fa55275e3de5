#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/rng.hpp"
#include "uavslice/slicing.hpp"

namespace uavslice {

enum class HeuristicKind { Random, RAPoC, PAPoC };

inline constexpr std::array<HeuristicKind, 3> kAllHeuristics = {HeuristicKind::Random, HeuristicKind::RAPoC,
                                                                HeuristicKind::PAPoC};

inline const char* heuristic_name(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::Random: return "random";
    case HeuristicKind::RAPoC: return "rapoc";
    case HeuristicKind::PAPoC: return "papoc";
  }
  return "?";
}

struct RandomDecision {
  MoveAction move;
  BandwidthSplit split;
};

// Move first, then split; both uniform.
inline RandomDecision random_policy(Rng& rng, std::span<const BandwidthSplit> simplex) {
  const auto move = static_cast<MoveAction>(rng.uniform_index(kMoveCount));
  const auto split = simplex[rng.uniform_index(simplex.size())];
  return {move, split};
}

// Mean position of the users generated from each cluster. An empty cluster
// falls back to its generating center.
inline std::vector<Vec2> cluster_centroids(const WorldState& world) {
  const std::size_t k = world.cluster_centers.size();
  std::vector<Vec2> sums(k);
  std::vector<std::size_t> counts(k, 0);
  for (const auto& u : world.users) {
    sums[u.cluster].x += u.position.x;
    sums[u.cluster].y += u.position.y;
    ++counts[u.cluster];
  }
  std::vector<Vec2> centroids(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      centroids[c] = world.cluster_centers[c];
    } else {
      const double n = static_cast<double>(counts[c]);
      centroids[c] = {sums[c].x / n, sums[c].y / n};
    }
  }
  return centroids;
}

// Minimum-cost perfect assignment (Hungarian method, O(n^3)) on a square
// cost matrix. Returns column assigned to each row.
inline std::vector<std::size_t> optimal_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Centroid target for each UAV (indexed by UAV id) minimizing total squared
// travel distance.
inline std::vector<Vec2> assign_centroids(const WorldState& world) {
  const auto centroids = cluster_centroids(world);
  const std::size_t n = world.uavs.size();
  if (centroids.size() != n) throw DimensionMismatch("centroid placement needs one cluster per UAV");
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = squared_distance(world.uavs[i].position, centroids[j]);
  const auto match = optimal_assignment(cost);
  std::vector<Vec2> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = centroids[match[i]];
  return targets;
}

enum class ProportionalForm {
  Aggregated,  // covered users of a slice x that slice's demand
  PerUser,     // slice demands alone, as a constant ratio
};

// Bandwidth proportional to the demand of the users served by `uav`. An
// uncovered UAV splits evenly.
inline BandwidthSplit papoc_split(const WorldState& world, std::size_t uav, std::span<const LinkReport> links,
                                  const std::array<double, kSliceCount>& slice_demands_bps,
                                  ProportionalForm form = ProportionalForm::Aggregated) {
  std::array<double, kSliceCount> weight{};
  bool any = false;
  for (std::size_t g = 0; g < world.users.size(); ++g) {
    if (links[g].serving_uav != uav) continue;
    any = true;
    weight[index_of(world.users[g].slice)] += world.users[g].demand_bps;
  }
  if (!any) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  if (form == ProportionalForm::PerUser) weight = slice_demands_bps;
  const double total = weight[0] + weight[1] + weight[2];
  BandwidthSplit split{weight[0] / total, weight[1] / total, 0.0};
  split.mm = std::max(0.0, 1.0 - split.em - split.ur);
  return split;
}

inline BandwidthSplit papoc_split(const WorldState& world, std::size_t uav, std::span<const LinkReport> links,
                                  const ArenaConfig& cfg, ProportionalForm form = ProportionalForm::Aggregated) {
  return papoc_split(world, uav, links, cfg.slice_demands_bps, form);
}

}  // namespace uavslice
