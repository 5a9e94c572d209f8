#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tkv/types.hpp"

namespace tkv {

// Thin wrapper over mt19937_64 producing bit-stable doubles across platforms
// (std::uniform_real_distribution is implementation-defined, so map the raw
// 64-bit stream ourselves).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal() {  // Box-Muller, one value per call pair kept simple
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    cplx normal_complex() { return {normal(), normal()}; }
    cplx unit_phase() {
        const double t = uniform(0.0, 6.283185307179586);
        return {std::cos(t), std::sin(t)};
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace tkv
