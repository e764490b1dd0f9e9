#pragma once

#include <span>

#include "terradeploy/sensing.hpp"
#include "terradeploy/terrain.hpp"

namespace terradeploy {

struct EnergyParams {
  double hover_power_w = 275.204;  // P0
  double scale_height_m = 44330.0;  // H_s
  double hover_time_s = 900.0;      // t_d
  double safe_altitude_m = 50.0;    // H_safe
  double exponent = 2.128;

  void validate() const;
};

/// P0 t_d (1 - h / H_s)^(-exponent). Throws outside 0 < h < H_s.
double hover_energy(double altitude, const EnergyParams& ep);
/// Same formula without the domain check; h < 0 is allowed and h >= H_s
/// yields +inf.
double hover_energy_unchecked(double altitude, const EnergyParams& ep);

/// Mean over UAVs of E(h_m) - E(H_safe), with h_m measured above the
/// terrain. Throws naming the first UAV outside (0, H_s).
double avg_excess_energy(std::span<const UavState> uavs, const TerrainModel& terrain,
                         const EnergyParams& ep);

double excess_energy_unchecked(double altitude, const EnergyParams& ep);

}  // namespace terradeploy
