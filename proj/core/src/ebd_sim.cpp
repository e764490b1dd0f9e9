#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "terradeploy/rng.hpp"
#include "terradeploy/sensing.hpp"

namespace terradeploy {

namespace {

double eigen_ratio(const Eigen::MatrixXcd& y) {
  const Eigen::MatrixXcd r = (y * y.adjoint()) / static_cast<double>(y.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  return ev(ev.size() - 1) / ev(0);
}

}  // namespace

EbdSimulation simulate_ebd(const EbdParams& p, double snr, std::size_t trials, std::uint64_t seed) {
  p.validate();
  if (p.elements < 2) throw std::invalid_argument("simulate_ebd: needs L >= 2");
  if (trials == 0) throw std::invalid_argument("simulate_ebd: needs at least one trial");
  if (!(snr >= 0.0)) throw std::invalid_argument("simulate_ebd: snr must be >= 0");

  const auto L = static_cast<Eigen::Index>(p.elements);
  const auto K = static_cast<Eigen::Index>(p.samples);
  const double threshold = ebd_threshold(p);
  const double amp = std::sqrt(snr);
  // Unit-variance circular complex Gaussian: real and imaginary parts N(0, 1/2).
  const double half = std::sqrt(0.5);

  RandomStream rng(seed, "ebd-sim");
  Eigen::MatrixXcd noise(L, K);
  Eigen::MatrixXcd received(L, K);
  std::size_t detections = 0;
  std::size_t false_alarms = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index k = 0; k < K; ++k)
      for (Eigen::Index l = 0; l < L; ++l)
        noise(l, k) = {half * rng.normal(), half * rng.normal()};
    received = noise;
    for (Eigen::Index k = 0; k < K; ++k) {
      const std::complex<double> s{half * rng.normal(), half * rng.normal()};
      received.col(k).array() += amp * s;
    }
    if (eigen_ratio(noise) > threshold) ++false_alarms;
    if (eigen_ratio(received) > threshold) ++detections;
  }
  const double n = static_cast<double>(trials);
  return {static_cast<double>(detections) / n, static_cast<double>(false_alarms) / n, threshold};
}

}  // namespace terradeploy
