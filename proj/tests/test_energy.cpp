#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "terradeploy/energy.hpp"

using namespace terradeploy;

TEST(HoverEnergy, ReferenceValues) {
  const EnergyParams ep;
  EXPECT_NEAR(hover_energy_unchecked(0.0, ep), oracle::kHoverGround, 1e-9);
  EXPECT_NEAR(hover_energy(1000.0, ep), oracle::kHover1000, 1e-8);
  EXPECT_NEAR(hover_energy(50.0, ep), oracle::kHover50, 1e-8);
  EXPECT_NEAR(hover_energy(100.0, ep), oracle::kHover100, 1e-8);
}

TEST(HoverEnergy, StrictlyIncreasingInAltitude) {
  const EnergyParams ep;
  double prev = 0.0;
  for (double h = 1.0; h < 44000.0; h *= 1.5) {
    const double e = hover_energy(h, ep);
    EXPECT_GT(e, prev) << h;
    prev = e;
  }
}

TEST(HoverEnergy, DomainChecked) {
  const EnergyParams ep;
  EXPECT_THROW(hover_energy(0.0, ep), std::domain_error);
  EXPECT_THROW(hover_energy(-1.0, ep), std::domain_error);
  EXPECT_THROW(hover_energy(ep.scale_height_m, ep), std::domain_error);
  EXPECT_EQ(hover_energy_unchecked(ep.scale_height_m, ep), std::numeric_limits<double>::infinity());
  EXPECT_LT(hover_energy_unchecked(-100.0, ep), oracle::kHoverGround);
}

TEST(ExcessEnergy, ZeroAtSafeAltitude) {
  const EnergyParams ep;
  EXPECT_EQ(excess_energy_unchecked(ep.safe_altitude_m, ep), 0.0);
  EXPECT_NEAR(excess_energy_unchecked(100.0, ep), oracle::kHover100 - oracle::kHover50, 1e-8);
}

TEST(AvgExcessEnergy, MeasuresAltitudeAboveTerrain) {
  const EnergyParams ep;
  const TerrainModel flat({}, 200.0);
  UavState a, b;
  a.position = {0, 0, 250.0};   // 50 m above ground
  b.position = {10, 0, 300.0};  // 100 m above ground
  const std::vector<UavState> uavs{a, b};
  EXPECT_NEAR(avg_excess_energy(uavs, flat, ep), 0.5 * (oracle::kHover100 - oracle::kHover50),
              1e-8);
}

TEST(AvgExcessEnergy, NamesOffendingUav) {
  const EnergyParams ep;
  const TerrainModel flat({}, 200.0);
  UavState a, b;
  a.position = {0, 0, 250.0};
  b.position = {0, 0, 150.0};
  const std::vector<UavState> uavs{a, b};
  try {
    avg_excess_energy(uavs, flat, ep);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("UAV 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(avg_excess_energy({}, flat, ep), std::invalid_argument);
}

TEST(EnergyParams, Validation) {
  EnergyParams ep;
  EXPECT_NO_THROW(ep.validate());
  ep.hover_power_w = 0.0;
  EXPECT_THROW(ep.validate(), std::invalid_argument);
  ep = {};
  ep.safe_altitude_m = ep.scale_height_m;
  EXPECT_THROW(ep.validate(), std::invalid_argument);
}
