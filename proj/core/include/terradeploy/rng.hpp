#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace terradeploy {

// Derives an independent 64-bit seed from a root seed and a textual label,
// e.g. derive_seed(42, "ga-gen:17"). Streams with distinct labels never share
// state, so draw order does not depend on evaluation scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t root, std::string_view label)
      : engine_(derive_seed(root, label)) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double uniform01() { return uniform(0.0, 1.0); }
  double normal() { return normal_(engine_); }

  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace terradeploy
