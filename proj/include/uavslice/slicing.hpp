#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/radio.hpp"

namespace uavslice {

// Fractions of one UAV's band reserved for eMBB, URLLC and mMTC.
struct BandwidthSplit {
  double em = 1.0 / 3.0;
  double ur = 1.0 / 3.0;
  double mm = 1.0 / 3.0;

  double operator[](SliceKind s) const {
    switch (s) {
      case SliceKind::eMBB: return em;
      case SliceKind::URLLC: return ur;
      case SliceKind::mMTC: return mm;
    }
    return 0.0;
  }

  bool valid(double tol = 1e-9) const {
    return em >= 0.0 && ur >= 0.0 && mm >= 0.0 && std::abs(em + ur + mm - 1.0) <= tol;
  }

  friend bool operator==(const BandwidthSplit&, const BandwidthSplit&) = default;
};

// All splits whose fractions are multiples of `step`, ordered by (em, ur)
// ascending. step 0.1 gives 66 points.
inline std::vector<BandwidthSplit> simplex_grid(double step) {
  const double inv = 1.0 / step;
  const long k = std::lround(inv);
  if (k < 1 || std::abs(inv - static_cast<double>(k)) > 1e-9) throw ConfigError("1/bw_step must be a positive integer");
  std::vector<BandwidthSplit> grid;
  grid.reserve(static_cast<std::size_t>((k + 1) * (k + 2) / 2));
  const double kd = static_cast<double>(k);
  for (long i = 0; i <= k; ++i)
    for (long j = 0; i + j <= k; ++j)
      grid.push_back({static_cast<double>(i) / kd, static_cast<double>(j) / kd, static_cast<double>(k - i - j) / kd});
  return grid;
}

inline std::size_t nearest_split_index(const BandwidthSplit& split, std::span<const BandwidthSplit> grid) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double de = grid[i].em - split.em;
    const double du = grid[i].ur - split.ur;
    const double dm = grid[i].mm - split.mm;
    const double d = de * de + du * du + dm * dm;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

using PrbBudget = std::array<int, kSliceCount>;

// Largest-remainder apportionment; remainder ties go to eMBB, then URLLC.
inline PrbBudget prb_partition(const BandwidthSplit& split, int total_prbs = kPrbsPerTti) {
  const std::array<double, kSliceCount> fractions = {split.em, split.ur, split.mm};
  PrbBudget counts{};
  std::array<double, kSliceCount> remainders{};
  int assigned = 0;
  for (std::size_t s = 0; s < kSliceCount; ++s) {
    double quota = fractions[s] * total_prbs;
    const double nearest = std::round(quota);
    if (std::abs(quota - nearest) < 1e-9) quota = nearest;
    counts[s] = static_cast<int>(std::floor(quota));
    remainders[s] = quota - counts[s];
    assigned += counts[s];
  }
  for (int left = total_prbs - assigned; left > 0; --left) {
    std::size_t pick = 0;
    for (std::size_t s = 1; s < kSliceCount; ++s)
      if (remainders[s] > remainders[pick]) pick = s;
    ++counts[pick];
    remainders[pick] = -1.0;
  }
  return counts;
}

// PRB share of the i-th of n users when `slice_prbs` are dealt round robin
// starting from the lowest id.
inline int round_robin_share(int slice_prbs, std::size_t n, std::size_t i) {
  const int base = slice_prbs / static_cast<int>(n);
  const int extra = slice_prbs % static_cast<int>(n);
  return base + (static_cast<int>(i) < extra ? 1 : 0);
}

// Shares aligned with `user_ids` (sorted ascending).
inline std::vector<int> round_robin(int slice_prbs, std::span<const std::size_t> user_ids) {
  std::vector<int> shares(user_ids.size());
  for (std::size_t i = 0; i < user_ids.size(); ++i) shares[i] = round_robin_share(slice_prbs, user_ids.size(), i);
  return shares;
}

// Indexed by user id (ids are dense) and UAV id.
struct ScheduleOutcome {
  std::vector<int> prbs_per_user;
  std::vector<double> rate_per_user;
  std::vector<bool> satisfied;
  std::vector<int> per_uav_reward;

  int total_reward() const {
    int sum = 0;
    for (int r : per_uav_reward) sum += r;
    return sum;
  }

  int satisfied_count() const {
    int n = 0;
    for (bool s : satisfied) n += s ? 1 : 0;
    return n;
  }
};

inline bool meets_sla(double rate_bps, double demand_bps) { return rate_bps >= demand_bps; }

inline ScheduleOutcome evaluate(const WorldState& world, std::span<const BandwidthSplit> splits,
                                std::span<const LinkReport> links) {
  const std::size_t n_users = world.users.size();
  const std::size_t n_uavs = world.uavs.size();
  if (splits.size() != n_uavs) throw DimensionMismatch("one split per UAV required");
  if (links.size() != n_users) throw DimensionMismatch("one link report per user required");

  ScheduleOutcome out;
  out.prbs_per_user.assign(n_users, 0);
  out.rate_per_user.assign(n_users, 0.0);
  out.satisfied.assign(n_users, false);
  out.per_uav_reward.assign(n_uavs, 0);

  // members[b][s]: ids of users of slice s served by UAV b, ascending.
  std::vector<std::array<std::vector<std::size_t>, kSliceCount>> members(n_uavs);
  for (std::size_t g = 0; g < n_users; ++g) {
    const auto& link = links[g];
    if (!link.serving_uav) continue;
    members[*link.serving_uav][index_of(world.users[g].slice)].push_back(world.users[g].id);
  }

  for (std::size_t b = 0; b < n_uavs; ++b) {
    const PrbBudget budget = prb_partition(splits[b]);
    for (std::size_t s = 0; s < kSliceCount; ++s) {
      const auto& ids = members[b][s];
      if (ids.empty()) continue;
      const auto shares = round_robin(budget[s], ids);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t g = ids[i];
        out.prbs_per_user[g] = shares[i];
        out.rate_per_user[g] = data_rate_bps(links[g].bits_per_symbol, links[g].code_rate, shares[i]);
        out.satisfied[g] = meets_sla(out.rate_per_user[g], world.users[g].demand_bps);
        if (out.satisfied[g]) ++out.per_uav_reward[b];
      }
    }
  }
  return out;
}

}  // namespace uavslice
