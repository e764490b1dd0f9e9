#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "terradeploy/sensing.hpp"

using namespace terradeploy;

namespace {

constexpr double kPi = std::numbers::pi;
const AntennaParams kAntenna = AntennaParams::from_degrees(15.0, 15.0);

UavState uav_at(Point3 p, double eta = 0.0, double zeta = 0.0, Band band = {100.0, 400.0}) {
  UavState u;
  u.position = p;
  u.eta = eta;
  u.zeta = zeta;
  u.band = band;
  return u;
}

Target target_at(Point3 p, std::vector<double> channels = {200.0}) {
  Target t;
  t.position = p;
  t.channels = std::move(channels);
  return t;
}

}  // namespace

TEST(QFunction, MatchesQuadratureOracle) {
  for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5, 4.0})
    EXPECT_NEAR(q_function(x), oracle::normal_tail(x), 1e-12) << x;
}

TEST(QInverse, MatchesReferenceAndInvertsQ) {
  EXPECT_NEAR(q_inverse(1e-3), oracle::kQinvMilli, 1e-13);
  EXPECT_NEAR(q_inverse(0.5), 0.0, 1e-15);
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.7, 0.999})
    EXPECT_NEAR(q_function(q_inverse(p)) / p, 1.0, 1e-12) << p;
  EXPECT_THROW(q_inverse(0.0), std::invalid_argument);
  EXPECT_THROW(q_inverse(1.0), std::invalid_argument);
}

TEST(EbdThreshold, MatchesReference) {
  EXPECT_NEAR(ebd_threshold({1000, 4, 1e-3}), oracle::kThresholdK1000, 1e-13);
}

TEST(EbdThreshold, HalfFalseAlarmGivesOne) { EXPECT_NEAR(ebd_threshold({1000, 4, 0.5}), 1.0, 1e-15); }

TEST(EbdThreshold, QuadruplingSamplesHalvesOffset) {
  const double a = ebd_threshold({1000, 4, 0.01}) - 1.0;
  const double b = ebd_threshold({4000, 4, 0.01}) - 1.0;
  EXPECT_NEAR(b / a, 0.5, 1e-14);
}

TEST(EbdThreshold, RejectsFalseAlarmOutsideUnitInterval) {
  EXPECT_THROW(ebd_threshold({1000, 4, 0.0}), std::invalid_argument);
  EXPECT_THROW(ebd_threshold({1000, 4, 1.0}), std::invalid_argument);
}

TEST(DetectionProbability, ZeroSnrGivesFalseAlarm) {
  for (double pfa : {1e-4, 1e-3, 0.05, 0.2})
    EXPECT_NEAR(detection_probability(0.0, {1000, 4, pfa}), pfa, 1e-12 * pfa);
  EXPECT_NEAR(detection_probability(0.0, {}), 0.001, 1e-15);
}

TEST(DetectionProbability, MatchesReferenceValues) {
  const EbdParams p;
  EXPECT_NEAR(detection_probability(0.01, p), oracle::kPdSnr001, 1e-14);
  EXPECT_NEAR(detection_probability(0.05, p), oracle::kPdSnr005, 1e-14);
  EXPECT_NEAR(detection_probability(0.1, p), oracle::kPdSnr01, 1e-14);
  EXPECT_NEAR(detection_probability(0.5, p), oracle::kPdSnr05, 1e-14);
  EXPECT_NEAR(detection_probability(0.1, p), oracle::normal_tail(oracle::kQArgSnr01), 1e-12);
}

TEST(DetectionProbability, SaturatesAtLargeSnr) {
  EXPECT_GE(detection_probability(1e6, {}), 1.0 - 1e-12);
  EXPECT_LE(detection_probability(1e6, {}), 1.0);
}

TEST(DetectionProbability, IncreasesInSnrAndSamples) {
  double prev = -1.0;
  for (double snr = 0.0; snr <= 0.4; snr += 0.01) {
    const double pd = detection_probability(snr, {});
    EXPECT_GT(pd, prev);
    prev = pd;
  }
  for (double snr : {0.02, 0.05, 0.1})
    EXPECT_LT(detection_probability(snr, {500, 4, 1e-3}), detection_probability(snr, {1000, 4, 1e-3}));
}

TEST(AntennaGain, BoresightIsExactlyOne) {
  const auto u = uav_at({0, 0, 100}, 0.0, 0.0);
  EXPECT_EQ(antenna_gain(u, target_at({1000, 0, 100}), kAntenna, true), 1.0);
}

TEST(AntennaGain, HalfBeamwidthOffsetIsHalfPower) {
  const auto t = target_at({1000, 0, 100});
  EXPECT_NEAR(antenna_gain(uav_at({0, 0, 100}, kAntenna.beamwidth_azimuth / 2), t, kAntenna, true),
              0.5, 1e-12);
  EXPECT_NEAR(antenna_gain(uav_at({0, 0, 100}, 0.0, -kAntenna.beamwidth_elevation / 2), t, kAntenna, true),
              0.5, 1e-12);
}

TEST(AntennaGain, CutoffAndLosGate) {
  const auto t = target_at({1000, 0, 100});
  const double a = kAntenna.beamwidth_azimuth;
  EXPECT_NEAR(antenna_gain(uav_at({0, 0, 100}, a * (1 - 1e-12)), t, kAntenna, true), 1.0 / 16.0, 1e-9);
  EXPECT_EQ(antenna_gain(uav_at({0, 0, 100}, a * 1.001), t, kAntenna, true), 0.0);
  EXPECT_EQ(antenna_gain(uav_at({0, 0, 100}, 0.0, 0.5), t, kAntenna, true), 0.0);
  EXPECT_EQ(antenna_gain(uav_at({0, 0, 100}), t, kAntenna, false), 0.0);
}

TEST(AntennaGain, SymmetricAndBounded) {
  const auto t = target_at({1000, 0, 100});
  for (double off : {0.01, 0.05, 0.1, 0.2}) {
    const double g1 = antenna_gain(uav_at({0, 0, 100}, off), t, kAntenna, true);
    const double g2 = antenna_gain(uav_at({0, 0, 100}, -off), t, kAntenna, true);
    const double g3 = antenna_gain(uav_at({0, 0, 100}, 0.0, off), t, kAntenna, true);
    const double g4 = antenna_gain(uav_at({0, 0, 100}, 0.0, -off), t, kAntenna, true);
    EXPECT_DOUBLE_EQ(g1, g2);
    EXPECT_DOUBLE_EQ(g3, g4);
    EXPECT_GE(g1, 0.0);
    EXPECT_LT(g1, 1.0);
  }
}

TEST(AntennaGain, AzimuthDifferenceWrapsAcrossPi) {
  // Target due "west" at azimuth -pi + 0.01; boresight at pi - 0.01: 0.02 rad apart.
  const Point3 u{0, 0, 0};
  const Point3 t{1000 * std::cos(-kPi + 0.01), 1000 * std::sin(-kPi + 0.01), 0};
  const double g = antenna_gain(uav_at(u, kPi - 0.01), target_at(t), kAntenna, true);
  const double s = kAntenna.sigma_azimuth();
  EXPECT_NEAR(g, std::exp(-0.02 * 0.02 / (2 * s * s)), 1e-9);
}

TEST(AntennaGain, CoincidentPositionsRejected) {
  EXPECT_THROW(antenna_gain(uav_at({1, 2, 3}), target_at({1, 2, 3}), kAntenna, true),
               std::invalid_argument);
}

TEST(Sinr, ReferenceLinkBudget) {
  const LinkBudget lb{0.1, 0.01, 7.0, 1e-11};
  EXPECT_NEAR(sinr(lb, 1.0, 1000.0), 700.0, 1e-9);
  EXPECT_EQ(sinr(lb, 0.0, 1000.0), 0.0);
  EXPECT_DOUBLE_EQ(sinr(lb, 0.3, 2000.0), sinr(lb, 0.3, 1000.0) / 4.0);
  EXPECT_THROW(sinr(lb, 1.0, 0.0), std::invalid_argument);
}

class LinkTest : public ::testing::Test {
 protected:
  TerrainModel hill{{{100.0, 500.0, 0.0, 100.0, 100.0}}};
  Bvh bvh{hill, 2.0};
  SensingContext ctx{&hill, &bvh, EbdParams{}, kAntenna, LinkBudget{}, 1e-5};
};

TEST_F(LinkTest, OutOfBandIsZero) {
  const auto u = uav_at({0, 0, 150}, 0.0, 0.0, {100.0, 200.0});
  const auto t = target_at({1000, 0, 150}, {200.0, 250.0});
  EXPECT_EQ(link_detection_probability(u, t, 200.0, ctx), 0.0);  // band edge is excluded
  EXPECT_EQ(link_detection_probability(u, t, 250.0, ctx), 0.0);
}

TEST_F(LinkTest, BlockedLinkFloorsAtFalseAlarm) {
  const auto u = uav_at({0, 0, 50});
  const auto t = target_at({1000, 0, 50});
  EXPECT_NEAR(link_detection_probability(u, t, 200.0, ctx), 0.001, 1e-15);
}

TEST_F(LinkTest, AlignedClearLinkSaturates) {
  const auto u = uav_at({0, 0, 300});
  const auto t = target_at({1000, 0, 300});
  EXPECT_GE(link_detection_probability(u, t, 200.0, ctx), 1.0 - 1e-12);
}

TEST(CooperativeFusion, OrRule) {
  const std::vector<UavState> uavs{uav_at({0, 0, 0}), uav_at({0, 1, 0})};
  const std::vector<Target> targets{target_at({5, 5, 5}, {150.0})};
  EXPECT_DOUBLE_EQ(fuse_links(uavs, targets, {{0.5}, {0.5}}).p_sum, 0.75);
  EXPECT_DOUBLE_EQ(fuse_links(uavs, targets, {{1.0}, {0.3}}).per_target[0][0], 1.0);
  EXPECT_DOUBLE_EQ(fuse_links(uavs, targets, {{0.0}, {0.0}}).p_sum, 0.0);
}

TEST(CooperativeFusion, BandGateIsPerChannel) {
  const std::vector<UavState> uavs{uav_at({0, 0, 0}, 0, 0, {100.0, 160.0}),
                                   uav_at({0, 1, 0}, 0, 0, {140.0, 300.0})};
  const std::vector<Target> targets{target_at({5, 5, 5}, {110.0, 150.0, 200.0})};
  const auto r = fuse_links(uavs, targets, {{0.5}, {0.2}});
  EXPECT_DOUBLE_EQ(r.per_target[0][0], 0.5);
  EXPECT_DOUBLE_EQ(r.per_target[0][1], 1.0 - 0.5 * 0.8);
  EXPECT_DOUBLE_EQ(r.per_target[0][2], 0.2);
}

TEST(CooperativeFusion, AddingUavNeverDecreasesAndSumIsBounded) {
  const std::vector<Target> targets{target_at({5, 5, 5}, {110.0, 150.0}), target_at({9, 9, 9}, {200.0})};
  std::vector<UavState> uavs{uav_at({0, 0, 0}, 0, 0, {100.0, 160.0})};
  std::vector<std::vector<double>> link{{0.4, 0.0}};
  const auto before = fuse_links(uavs, targets, link);
  uavs.push_back(uav_at({0, 1, 0}, 0, 0, {100.0, 300.0}));
  link.push_back({0.3, 0.9});
  const auto after = fuse_links(uavs, targets, link);
  for (std::size_t n = 0; n < targets.size(); ++n)
    for (std::size_t k = 0; k < targets[n].channels.size(); ++k)
      EXPECT_GE(after.per_target[n][k], before.per_target[n][k]);
  EXPECT_LE(after.p_sum, 3.0);
}

TEST(SimulateEbd, DeterministicAndNullHypothesisConsistent) {
  const EbdParams p{1000, 4, 1e-3};
  const auto a = simulate_ebd(p, 0.0, 2000, 5);
  const auto b = simulate_ebd(p, 0.0, 2000, 5);
  EXPECT_EQ(a.detection_rate, b.detection_rate);
  EXPECT_EQ(a.false_alarm_rate, b.false_alarm_rate);
  EXPECT_EQ(a.threshold, ebd_threshold(p));
  // At snr = 0 both hypotheses share a distribution: difference within 3 sigma.
  const double pbar = 0.5 * (a.detection_rate + a.false_alarm_rate);
  const double sigma = std::sqrt(2.0 * pbar * (1.0 - pbar) / 2000.0);
  EXPECT_LE(std::abs(a.detection_rate - a.false_alarm_rate), 3.0 * sigma + 1e-12);
}

TEST(SimulateEbd, RejectsSingleElement) {
  EXPECT_THROW(simulate_ebd({1000, 1, 1e-3}, 0.1, 10, 1), std::invalid_argument);
}

TEST(MissProbability, ComplementsDetectionAndResolvesSaturation) {
  const EbdParams p;
  for (double snr : {0.0, 0.01, 0.1, 0.3})
    EXPECT_NEAR(miss_probability(snr, p) + detection_probability(snr, p), 1.0, 1e-15) << snr;
  // P_d rounds to 1 here but the miss probability still orders the SNRs.
  EXPECT_EQ(detection_probability(1.0, p), 1.0);
  EXPECT_GT(miss_probability(1.0, p), 0.0);
  EXPECT_GT(miss_probability(1.0, p), miss_probability(10.0, p));
  EXPECT_NEAR(miss_probability(1.0, p) / oracle::normal_tail((std::sqrt(500.0) - oracle::kQinvMilli) / 2.0),
              1.0, 1e-6);
}
