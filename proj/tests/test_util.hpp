#pragma once

#include <vector>

#include "terradeploy/scenario.hpp"

namespace testutil {

/// Two targets east of the deployable strip with overlapping channel sets and
/// two UAV bands, over the given terrain.
inline terradeploy::Scenario two_target_scenario(terradeploy::TerrainModel terrain = {}) {
  using namespace terradeploy;
  Scenario s;
  s.terrain = std::move(terrain);
  const double z0 = s.terrain.elevation(3000, 1500) + 2.0;
  const double z1 = s.terrain.elevation(3500, 3800) + 2.0;
  s.targets = {Target{{3000, 1500, z0}, {105, 125, 145, 165, 185, 205, 225, 245}, 0.1},
               Target{{3500, 3800, z1}, {205, 225, 245, 265, 285, 305, 325, 345}, 0.1}};
  s.uav_bands = {Band{100, 250}, Band{200, 350}};
  s.bounds.h_max = 1500.0;
  return s;
}

/// One UAV, one single-channel target east of a 500 m square region over flat
/// ground. The transmit power puts the best reachable link on the steep part
/// of the detection curve, so fitness rewards range, pointing accuracy and a
/// low hover at once.
inline terradeploy::Scenario single_link_scenario() {
  using namespace terradeploy;
  Scenario s;
  s.targets = {Target{{1200, 250, 2}, {150}, dbm_to_watts(-20.0)}};
  s.uav_bands = {Band{100, 200}};
  s.bounds.region = {0, 500, 0, 500};
  s.bounds.h_max = 300.0;
  return s;
}

}  // namespace testutil
