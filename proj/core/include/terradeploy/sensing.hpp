#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "terradeploy/geometry.hpp"
#include "terradeploy/los.hpp"
#include "terradeploy/terrain.hpp"

namespace terradeploy {

/// Upper tail of the standard normal, 0.5 erfc(x / sqrt 2).
double q_function(double x);
/// Inverse of q_function on (0, 1).
double q_inverse(double p);

struct EbdParams {
  int samples = 1000;          // K
  int elements = 4;            // L
  double false_alarm = 0.001;  // P_fa

  /// Throws on K < 2, L < 1 or P_fa outside (0, 1).
  void validate() const;
  /// The Gaussian approximation of the eigenvalue ratio needs K >> L.
  bool closed_form_reliable() const { return samples >= 10 * elements; }
};

/// Threshold on lambda_max / lambda_min for the configured false-alarm rate.
double ebd_threshold(const EbdParams& p);
/// Closed-form detection probability at a linear SNR.
double detection_probability(double snr, const EbdParams& p);
/// 1 - detection_probability, evaluated without cancellation so it keeps
/// full relative precision where P_d rounds to 1.
double miss_probability(double snr, const EbdParams& p);

struct AntennaParams {
  double beamwidth_azimuth = 0.0;    // alpha_a, rad
  double beamwidth_elevation = 0.0;  // alpha_e, rad

  static AntennaParams from_degrees(double azimuth_deg, double elevation_deg);
  double sigma_azimuth() const;
  double sigma_elevation() const;
  void validate() const;
};

struct Band {
  double f_min = 0.0;  // MHz
  double f_max = 0.0;  // MHz

  /// Open interval check; a channel on either edge is out of band.
  bool contains(double f) const { return f > f_min && f < f_max; }
  bool intersects(std::span<const double> channels) const;

  friend bool operator==(const Band&, const Band&) = default;
};

struct Target {
  Point3 position;
  std::vector<double> channels;  // MHz, strictly increasing
  double tx_power_w = 0.1;

  void validate() const;
};

struct UavState {
  Point3 position;
  double eta = 0.0;   // boresight azimuth, rad
  double zeta = 0.0;  // boresight elevation, rad
  Band band;

  friend bool operator==(const UavState&, const UavState&) = default;
};

/// Channel constants shared by all links; the transmit power is per target.
struct LinkBudget {
  double tx_power_w = 0.1;    // P_n
  double ref_gain = 0.01;     // beta_0, linear
  double elements = 7.0;      // N_t
  double noise_w = 1e-11;     // sigma_n^2
};

/// Azimuth and elevation of `to` as seen from `from`; azimuth from atan2.
struct LookAngles {
  double azimuth;
  double elevation;
};
LookAngles look_angles(const Point3& from, const Point3& to);

/// Directional gain in [0, 1]; zero outside |d_eta| <= alpha_a, |d_zeta| <= alpha_e
/// or without line of sight.
double antenna_gain(const UavState& uav, const Target& target, const AntennaParams& ap, bool los);
/// Received signal-to-noise ratio (no interference term).
double sinr(const LinkBudget& lb, double gain, double distance);

struct SensingContext {
  const TerrainModel* terrain = nullptr;
  const Bvh* bvh = nullptr;
  EbdParams ebd;
  AntennaParams antenna;
  LinkBudget link;  // tx_power_w is replaced by the target's
  double los_epsilon = 1e-5;
};

/// Per-link probability for an in-band channel, ignoring the band gate.
double link_probability_in_band(const UavState& uav, const Target& target,
                                const SensingContext& ctx);
/// Band-gated per-link detection probability for channel f of a target.
double link_detection_probability(const UavState& uav, const Target& target, double f,
                                  const SensingContext& ctx);

struct CooperativeResult {
  double p_sum = 0.0;
  /// per_target[n][k]: fused probability for channel k of target n.
  std::vector<std::vector<double>> per_target;
};

/// OR-rule fusion of a precomputed link table: link[m][n] is UAV m's
/// in-band probability for target n; the band gate is applied per channel.
CooperativeResult fuse_links(std::span<const UavState> uavs, std::span<const Target> targets,
                             const std::vector<std::vector<double>>& link);

CooperativeResult cooperative_sum(std::span<const UavState> uavs, std::span<const Target> targets,
                                  const SensingContext& ctx);

struct EbdSimulation {
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  /// The threshold the statistic was compared against.
  double threshold = 0.0;
};

/// Monte Carlo of the eigenvalue-ratio detector: per trial K complex Gaussian
/// L-vectors under noise only and under noise plus a common (rank-one)
/// signal with per-element variance snr.
EbdSimulation simulate_ebd(const EbdParams& p, double snr, std::size_t trials, std::uint64_t seed);

}  // namespace terradeploy
