#include "terradeploy/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace terradeploy {

void EnergyParams::validate() const {
  if (!(hover_power_w > 0.0 && scale_height_m > 0.0 && hover_time_s > 0.0 &&
        safe_altitude_m > 0.0 && exponent > 0.0))
    throw std::invalid_argument("energy parameters must be positive");
  if (!(safe_altitude_m < scale_height_m))
    throw std::invalid_argument("safe altitude must be below the scale height");
}

double hover_energy_unchecked(double altitude, const EnergyParams& ep) {
  const double ratio = 1.0 - altitude / ep.scale_height_m;
  if (!(ratio > 0.0)) return std::numeric_limits<double>::infinity();
  return ep.hover_power_w * ep.hover_time_s * std::pow(ratio, -ep.exponent);
}

double hover_energy(double altitude, const EnergyParams& ep) {
  if (!(altitude > 0.0 && altitude < ep.scale_height_m))
    throw std::domain_error("hover_energy: altitude " + std::to_string(altitude) +
                            " outside (0, H_s)");
  return hover_energy_unchecked(altitude, ep);
}

double excess_energy_unchecked(double altitude, const EnergyParams& ep) {
  return hover_energy_unchecked(altitude, ep) - hover_energy_unchecked(ep.safe_altitude_m, ep);
}

double avg_excess_energy(std::span<const UavState> uavs, const TerrainModel& terrain,
                         const EnergyParams& ep) {
  if (uavs.empty()) throw std::invalid_argument("avg_excess_energy: no UAVs");
  const double floor = hover_energy(ep.safe_altitude_m, ep);
  double sum = 0.0;
  for (std::size_t m = 0; m < uavs.size(); ++m) {
    const auto& p = uavs[m].position;
    const double h = p.z - terrain.elevation(p.x, p.y);
    if (!(h > 0.0 && h < ep.scale_height_m))
      throw std::domain_error("avg_excess_energy: UAV " + std::to_string(m) + " altitude " +
                              std::to_string(h) + " outside (0, H_s)");
    sum += hover_energy(h, ep) - floor;
  }
  return sum / static_cast<double>(uavs.size());
}

}  // namespace terradeploy
