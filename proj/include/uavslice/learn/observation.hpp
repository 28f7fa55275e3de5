#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/slicing.hpp"

namespace uavslice::learn {

inline constexpr std::size_t kSectors = 8;
inline constexpr std::size_t kRings = 4;
inline constexpr std::array<double, kRings - 1> kRingEdgesM = {25.0, 75.0, 150.0};
inline constexpr std::size_t kMaxFleet = 5;
inline constexpr double kDemandNormalizerBps = 100e6;

inline constexpr std::size_t kAllocObsSize = kSliceCount;
inline constexpr std::size_t kGridCells = kSectors * kRings;
inline constexpr std::size_t kPlaceObsSize = kSliceCount * kGridCells + 2 * (kMaxFleet - 1) + kSliceCount;

// Aggregated demand of the UAV's associated users per slice.
struct AllocObservation {
  std::array<double, kSliceCount> agg_demand{};

  std::vector<float> encode() const {
    return {static_cast<float>(agg_demand[0]), static_cast<float>(agg_demand[1]), static_cast<float>(agg_demand[2])};
  }
};

inline AllocObservation make_alloc_observation(const WorldState& world, std::span<const LinkReport> links,
                                               std::size_t uav) {
  AllocObservation obs;
  for (std::size_t g = 0; g < world.users.size(); ++g)
    if (links[g].serving_uav == uav)
      obs.agg_demand[index_of(world.users[g].slice)] += world.users[g].demand_bps / kDemandNormalizerBps;
  return obs;
}

// Polar occupancy around the UAV (one sector x ring grid per slice), peer
// offsets and the split chosen by the allocation agent.
struct PlaceObservation {
  std::array<std::array<float, kGridCells>, kSliceCount> user_map{};
  std::array<float, 2 * (kMaxFleet - 1)> peer_positions{};
  BandwidthSplit chosen_split;

  std::vector<float> encode() const {
    std::vector<float> v;
    v.reserve(kPlaceObsSize);
    for (const auto& grid : user_map) v.insert(v.end(), grid.begin(), grid.end());
    v.insert(v.end(), peer_positions.begin(), peer_positions.end());
    v.push_back(static_cast<float>(chosen_split.em));
    v.push_back(static_cast<float>(chosen_split.ur));
    v.push_back(static_cast<float>(chosen_split.mm));
    return v;
  }
};

inline std::size_t ring_of(double distance_m) {
  std::size_t r = 0;
  while (r < kRingEdgesM.size() && distance_m >= kRingEdgesM[r]) ++r;
  return r;
}

inline std::size_t sector_of(double dx, double dy) {
  double angle = std::atan2(dy, dx);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  auto s = static_cast<std::size_t>(angle / (2.0 * std::numbers::pi / static_cast<double>(kSectors)));
  return s >= kSectors ? kSectors - 1 : s;
}

inline PlaceObservation make_place_observation(const WorldState& world, std::size_t uav, const BandwidthSplit& split) {
  PlaceObservation obs;
  const Vec2 me = world.uavs[uav].position;
  for (const auto& u : world.users) {
    const double dx = u.position.x - me.x;
    const double dy = u.position.y - me.y;
    const std::size_t cell = sector_of(dx, dy) * kRings + ring_of(std::sqrt(dx * dx + dy * dy));
    obs.user_map[index_of(u.slice)][cell] += 1.0f;
  }
  std::size_t slot = 0;
  for (std::size_t k = 0; k < world.uavs.size() && slot < kMaxFleet - 1; ++k) {
    if (k == uav) continue;
    obs.peer_positions[2 * slot] = static_cast<float>((world.uavs[k].position.x - me.x) / world.arena_side_m);
    obs.peer_positions[2 * slot + 1] = static_cast<float>((world.uavs[k].position.y - me.y) / world.arena_side_m);
    ++slot;
  }
  obs.chosen_split = split;
  return obs;
}

}  // namespace uavslice::learn
