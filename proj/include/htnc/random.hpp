#pragma once

#include <cstdint>
#include <random>

namespace htnc {

// Uniform on the open interval (0, 1) from the top 53 bits; identical on
// every platform, unlike std::uniform_real_distribution.
inline double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace htnc
