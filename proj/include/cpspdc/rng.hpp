// Copyright 2026 The cpspdc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPSPDC_RNG_HPP
#define CPSPDC_RNG_HPP

#include <cmath>
#include <cstdint>

#include "cpspdc/units.hpp"

namespace cpspdc {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw d of stream s under key `seed` is a pure
/// function of (seed, s, d). Streams are pulse indices in the simulators, so
/// results do not depend on how pulses are split across threads.
class CounterRng {
   public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(stream * 0xd1342543de82ef95ULL + 0x3c6ef372fe94f82bULL)) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + mix64(counter_++)); }
    std::uint64_t draws() const noexcept { return counter_; }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (consumes two draws).
    double normal() noexcept {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    /// Bose-Einstein (geometric on {0, 1, ...}) with the given mean.
    std::uint64_t thermal(double mean) noexcept {
        if (!(mean > 0.0)) return 0;
        double ratio = mean / (1.0 + mean);
        return static_cast<std::uint64_t>(std::floor(std::log(uniform()) / std::log(ratio)));
    }

    /// Poisson by inversion; intended for small means (dark counts per pulse).
    std::uint64_t poisson(double mean) noexcept {
        if (!(mean > 0.0)) return 0;
        double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cpspdc

#endif
