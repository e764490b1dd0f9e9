#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "terradeploy/sensing.hpp"

namespace terradeploy {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("q_inverse: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  // Bracket then bisect; Q is strictly decreasing.
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p) lo = mid;
    else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // One Newton polish; Q'(x) = -phi(x).
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (phi > 0.0) x -= (p - q_function(x)) / phi;
  return x;
}

void EbdParams::validate() const {
  if (samples < 2) throw std::invalid_argument("EBD sample count K must be >= 2");
  if (elements < 1) throw std::invalid_argument("EBD element count L must be >= 1");
  if (!(false_alarm > 0.0 && false_alarm < 1.0))
    throw std::invalid_argument("EBD false-alarm probability must lie in (0, 1)");
}

double ebd_threshold(const EbdParams& p) {
  p.validate();
  return 1.0 + std::sqrt(2.0 / p.samples) * q_inverse(p.false_alarm);
}

namespace {

double detection_argument(double snr, const EbdParams& p) {
  p.validate();
  if (!(snr >= 0.0) || !std::isfinite(snr))
    throw std::invalid_argument("detection_probability: snr must be finite and >= 0");
  return (q_inverse(p.false_alarm) - snr * std::sqrt(p.samples / 2.0)) / (1.0 + snr);
}

}  // namespace

double detection_probability(double snr, const EbdParams& p) {
  return q_function(detection_argument(snr, p));
}

double miss_probability(double snr, const EbdParams& p) {
  return q_function(-detection_argument(snr, p));
}

namespace {
const double kHalfPowerDivisor = 2.0 * std::sqrt(2.0 * std::numbers::ln2);
}

AntennaParams AntennaParams::from_degrees(double azimuth_deg, double elevation_deg) {
  AntennaParams a{azimuth_deg * std::numbers::pi / 180.0, elevation_deg * std::numbers::pi / 180.0};
  a.validate();
  return a;
}

double AntennaParams::sigma_azimuth() const { return beamwidth_azimuth / kHalfPowerDivisor; }
double AntennaParams::sigma_elevation() const { return beamwidth_elevation / kHalfPowerDivisor; }

void AntennaParams::validate() const {
  if (!(beamwidth_azimuth > 0.0 && beamwidth_azimuth < std::numbers::pi))
    throw std::invalid_argument("azimuth beamwidth must lie in (0, pi)");
  if (!(beamwidth_elevation > 0.0 && beamwidth_elevation < std::numbers::pi / 2))
    throw std::invalid_argument("elevation beamwidth must lie in (0, pi/2)");
}

bool Band::intersects(std::span<const double> channels) const {
  for (double f : channels)
    if (contains(f)) return true;
  return false;
}

void Target::validate() const {
  if (channels.empty()) throw std::invalid_argument("target needs at least one channel");
  for (std::size_t i = 1; i < channels.size(); ++i)
    if (!(channels[i] > channels[i - 1]))
      throw std::invalid_argument("target channels must be strictly increasing");
  if (!(tx_power_w > 0.0)) throw std::invalid_argument("target transmit power must be positive");
}

LookAngles look_angles(const Point3& from, const Point3& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  return {std::atan2(dy, dx), std::atan2(dz, std::hypot(dx, dy))};
}

double antenna_gain(const UavState& uav, const Target& target, const AntennaParams& ap, bool los) {
  if (uav.position == target.position)
    throw std::invalid_argument("antenna_gain: UAV and target positions coincide");
  if (!los) return 0.0;
  const LookAngles look = look_angles(uav.position, target.position);
  const double d_eta = wrap_angle(look.azimuth - uav.eta);
  const double d_zeta = look.elevation - uav.zeta;
  if (std::abs(d_eta) > ap.beamwidth_azimuth || std::abs(d_zeta) > ap.beamwidth_elevation)
    return 0.0;
  const double se = ap.sigma_azimuth();
  const double sz = ap.sigma_elevation();
  return std::exp(-d_eta * d_eta / (2.0 * se * se) - d_zeta * d_zeta / (2.0 * sz * sz));
}

double sinr(const LinkBudget& lb, double gain, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("sinr: distance must be positive");
  return lb.tx_power_w * lb.ref_gain * lb.elements * gain / (distance * distance * lb.noise_w);
}

double link_probability_in_band(const UavState& uav, const Target& target,
                                const SensingContext& ctx) {
  const double d = distance(uav.position, target.position);
  if (!(d > 0.0)) throw std::invalid_argument("link: UAV and target positions coincide");
  // Skip the LoS query when the target sits outside the main lobe anyway.
  const double lobe = antenna_gain(uav, target, ctx.antenna, true);
  double gain = 0.0;
  if (lobe > 0.0) {
    const bool visible =
        los_query(*ctx.bvh, *ctx.terrain, {uav.position, target.position, ctx.los_epsilon}).visible;
    gain = visible ? lobe : 0.0;
  }
  LinkBudget lb = ctx.link;
  lb.tx_power_w = target.tx_power_w;
  return detection_probability(sinr(lb, gain, d), ctx.ebd);
}

double link_detection_probability(const UavState& uav, const Target& target, double f,
                                  const SensingContext& ctx) {
  if (!uav.band.contains(f)) return 0.0;
  return link_probability_in_band(uav, target, ctx);
}

CooperativeResult fuse_links(std::span<const UavState> uavs, std::span<const Target> targets,
                             const std::vector<std::vector<double>>& link) {
  CooperativeResult out;
  out.per_target.resize(targets.size());
  for (std::size_t n = 0; n < targets.size(); ++n) {
    const auto& ch = targets[n].channels;
    out.per_target[n].resize(ch.size());
    for (std::size_t k = 0; k < ch.size(); ++k) {
      double miss = 1.0;
      for (std::size_t m = 0; m < uavs.size(); ++m)
        if (uavs[m].band.contains(ch[k])) miss *= 1.0 - link[m][n];
      const double p = 1.0 - miss;
      out.per_target[n][k] = p;
      out.p_sum += p;
    }
  }
  return out;
}

CooperativeResult cooperative_sum(std::span<const UavState> uavs, std::span<const Target> targets,
                                  const SensingContext& ctx) {
  if (uavs.empty() || targets.empty())
    throw std::invalid_argument("cooperative_sum: need at least one UAV and one target");
  std::vector<std::vector<double>> link(uavs.size(), std::vector<double>(targets.size(), 0.0));
  for (std::size_t m = 0; m < uavs.size(); ++m)
    for (std::size_t n = 0; n < targets.size(); ++n)
      if (uavs[m].band.intersects(targets[n].channels))
        link[m][n] = link_probability_in_band(uavs[m], targets[n], ctx);
  return fuse_links(uavs, targets, link);
}

}  // namespace terradeploy
