// Seeded random source with a fixed, documented algorithm so that runs
// reproduce byte-identically: mt19937_64 for bits, 53-bit uniforms,
// Box-Muller for normals.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace shapedist {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; one transcendental pair per two draws.
  double gaussian();

  Eigen::VectorXd gaussian_vector(int n);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace shapedist
