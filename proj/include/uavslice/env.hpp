#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "uavslice/errors.hpp"
#include "uavslice/rng.hpp"

namespace uavslice {

enum class SliceKind : int { eMBB = 0, URLLC = 1, mMTC = 2 };

inline constexpr std::size_t kSliceCount = 3;
inline constexpr std::array<SliceKind, kSliceCount> kAllSlices = {SliceKind::eMBB, SliceKind::URLLC,
                                                                  SliceKind::mMTC};

inline constexpr std::size_t index_of(SliceKind s) { return static_cast<std::size_t>(s); }

inline const char* slice_name(SliceKind s) {
  switch (s) {
    case SliceKind::eMBB: return "eMBB";
    case SliceKind::URLLC: return "URLLC";
    case SliceKind::mMTC: return "mMTC";
  }
  return "?";
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct ArenaConfig {
  int uav_count = 2;
  double user_density_per_km2 = 100.0;
  double uav_density_per_km2 = 8.0;
  double uav_height_m = 50.0;
  double step_m = 25.0;
  double cluster_sigma_m = 40.0;
  std::array<double, kSliceCount> slice_probs = {0.2, 0.1, 0.7};
  std::array<double, kSliceCount> slice_demands_bps = {5e6, 10e6, 0.5e6};
  std::uint64_t seed = 1;

  double demand_of(SliceKind s) const { return slice_demands_bps[index_of(s)]; }

  // Throws ConfigError naming the first violated invariant.
  void validate() const {
    if (uav_count < 1) throw ConfigError("uav_count must be >= 1");
    if (!(user_density_per_km2 > 0.0)) throw ConfigError("user_density must be > 0");
    if (!(uav_density_per_km2 > 0.0)) throw ConfigError("uav_density must be > 0");
    if (!(uav_height_m > 0.0)) throw ConfigError("uav_height_m must be > 0");
    if (!(step_m > 0.0)) throw ConfigError("step_m must be > 0");
    if (!(cluster_sigma_m >= 0.0)) throw ConfigError("cluster_sigma_m must be >= 0");
    double sum = 0.0;
    for (double p : slice_probs) {
      if (!(p >= 0.0)) throw ConfigError("slice probabilities must be >= 0");
      sum += p;
    }
    if (sum > 1.0 + 1e-9) throw ConfigError("slice probabilities exceed 1 (sum " + std::to_string(sum) + ")");
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("slice probabilities must sum to 1 (sum " + std::to_string(sum) + ")");
    for (double d : slice_demands_bps)
      if (!(d > 0.0)) throw ConfigError("slice demands must be > 0");
  }
};

// Side of the square arena preserving the UAV density.
inline double arena_side_m(const ArenaConfig& cfg) {
  return std::sqrt(static_cast<double>(cfg.uav_count) / cfg.uav_density_per_km2) * 1000.0;
}

// Users preserving the user density; halves round up.
inline std::size_t user_count(const ArenaConfig& cfg) {
  const double area_km2 = static_cast<double>(cfg.uav_count) / cfg.uav_density_per_km2;
  return static_cast<std::size_t>(std::floor(cfg.user_density_per_km2 * area_km2 + 0.5));
}

struct UserEquipment {
  std::size_t id = 0;
  Vec2 position;
  SliceKind slice = SliceKind::eMBB;
  double demand_bps = 0.0;
  std::size_t cluster = 0;
};

struct UavState {
  std::size_t id = 0;
  Vec2 position;
  double height_m = 0.0;

  friend bool operator==(const UavState&, const UavState&) = default;
};

struct WorldState {
  double arena_side_m = 0.0;
  std::vector<UserEquipment> users;
  std::vector<Vec2> cluster_centers;
  std::vector<UavState> uavs;
  int timestep = 0;
};

enum class MoveAction : int { Straight = 0, Left = 1, Right = 2, Back = 3, Hover = 4 };

inline constexpr std::size_t kMoveCount = 5;

inline const char* move_name(MoveAction a) {
  switch (a) {
    case MoveAction::Straight: return "straight";
    case MoveAction::Left: return "left";
    case MoveAction::Right: return "right";
    case MoveAction::Back: return "back";
    case MoveAction::Hover: return "hover";
  }
  return "?";
}

// Inverse-CDF categorical draw over eMBB, URLLC, mMTC in that order.
inline SliceKind slice_from_uniform(const std::array<double, kSliceCount>& probs, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < kSliceCount; ++i) {
    cumulative += probs[i];
    if (u < cumulative) return kAllSlices[i];
  }
  return kAllSlices[kSliceCount - 1];
}

inline SliceKind assign_slice(const std::array<double, kSliceCount>& probs, Rng& rng) {
  return slice_from_uniform(probs, rng.uniform());
}

inline Vec2 clamp_to_arena(Vec2 p, double side) {
  return {std::clamp(p.x, 0.0, side), std::clamp(p.y, 0.0, side)};
}

// Compass moves: straight=+y, back=-y, left=-x, right=+x.
inline UavState apply_move(const UavState& uav, MoveAction action, double step_m, double arena_side) {
  UavState next = uav;
  switch (action) {
    case MoveAction::Straight: next.position.y += step_m; break;
    case MoveAction::Back: next.position.y -= step_m; break;
    case MoveAction::Left: next.position.x -= step_m; break;
    case MoveAction::Right: next.position.x += step_m; break;
    case MoveAction::Hover: break;
  }
  next.position = clamp_to_arena(next.position, arena_side);
  return next;
}

inline UavState apply_move(const UavState& uav, MoveAction action, const ArenaConfig& cfg) {
  return apply_move(uav, action, cfg.step_m, arena_side_m(cfg));
}

// Draw order is fixed: cluster centers, then per user (cluster, x, y, slice),
// then UAV positions.
inline WorldState spawn_episode(const ArenaConfig& cfg, Rng& rng) {
  WorldState world;
  const double side = arena_side_m(cfg);
  world.arena_side_m = side;

  const auto clusters = static_cast<std::size_t>(cfg.uav_count);
  const double inset = std::min(cfg.cluster_sigma_m, side / 2.0);
  world.cluster_centers.reserve(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    const double x = rng.uniform(inset, side - inset);
    const double y = rng.uniform(inset, side - inset);
    world.cluster_centers.push_back({x, y});
  }

  const std::size_t n_users = user_count(cfg);
  world.users.reserve(n_users);
  for (std::size_t id = 0; id < n_users; ++id) {
    UserEquipment ue;
    ue.id = id;
    ue.cluster = rng.uniform_index(clusters);
    const Vec2 center = world.cluster_centers[ue.cluster];
    const double x = center.x + cfg.cluster_sigma_m * rng.normal();
    const double y = center.y + cfg.cluster_sigma_m * rng.normal();
    ue.position = clamp_to_arena({x, y}, side);
    ue.slice = assign_slice(cfg.slice_probs, rng);
    ue.demand_bps = cfg.demand_of(ue.slice);
    world.users.push_back(ue);
  }

  world.uavs.reserve(clusters);
  for (std::size_t id = 0; id < clusters; ++id) {
    const double x = rng.uniform(0.0, side);
    const double y = rng.uniform(0.0, side);
    world.uavs.push_back({id, {x, y}, cfg.uav_height_m});
  }
  return world;
}

// Applies one move per UAV simultaneously and advances the clock.
inline WorldState step_world(const WorldState& world, const std::vector<MoveAction>& moves, double step_m) {
  if (moves.size() != world.uavs.size()) throw DimensionMismatch("one move per UAV required");
  WorldState next = world;
  for (std::size_t i = 0; i < next.uavs.size(); ++i)
    next.uavs[i] = apply_move(world.uavs[i], moves[i], step_m, world.arena_side_m);
  ++next.timestep;
  return next;
}

}  // namespace uavslice
