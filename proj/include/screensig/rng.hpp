#pragma once

// Deterministic random helpers. The mapping from mt19937_64 output to doubles
// is spelled out here (not delegated to std::uniform_real_distribution) so
// that identical seeds give bit-identical streams on every platform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "screensig/specfun.hpp"

namespace screensig {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // canonical 53-bit uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  // standard complex Gaussian with E|z|^2 = 1
  complexd complex_normal() {
    const double a = normal(), b = normal();
    return complexd(a, b) / std::sqrt(2.0);
  }

  // uniform in the disk of given center and radius
  Vec2 in_disk(const Vec2& center, double radius) {
    const double r = radius * std::sqrt(uniform());
    const double t = 2.0 * pi * uniform();
    return center + r * Vec2(std::cos(t), std::sin(t));
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace screensig
