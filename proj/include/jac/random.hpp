// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_RANDOM_HPP
#define JAC_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

#include "jac/math.hpp"

namespace jac {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based per-trial seed: a pure function of (master, value_index,
/// trial_index), so results do not depend on execution order or thread count.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t value_index,
                                std::uint64_t trial_index) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (value_index + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (trial_index + 0xbf58476d1ce4e5b9ULL));
    return h;
}

/// Derives an independent stream seed from (seed, salt).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt + 0x9e3779b97f4a7c15ULL));
}

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact per
/// the standard); all variate transforms are done here rather than through
/// std::*_distribution, whose algorithms are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform phase in [0, 2*pi).
    double phase() { return kTwoPi * uniform01(); }

    /// Pair of independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() {
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        return {rad * std::cos(kTwoPi * u2), rad * std::sin(kTwoPi * u2)};
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> circular_gaussian(double variance) {
        const auto [a, b] = normal_pair();
        const double s = std::sqrt(0.5 * variance);
        return {s * a, s * b};
    }

private:
    std::mt19937_64 eng_;
};

} // namespace jac

#endif // JAC_RANDOM_HPP
