// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_MATH_HPP
#define JAC_MATH_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace jac {

inline constexpr double kSpeedOfLight = 2.99792458e8;      // m/s
inline constexpr double kSpeedOfLightIdeal = 3.0e8;        // m/s, round-number convention
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr std::complex<double> kImag{0.0, 1.0};

/// sinc(x) = sin(x)/x with sinc(0) = 1.
inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

/// d/dx sinc(x) = (x cos x - sin x) / x^2; series near 0 to avoid cancellation.
inline double sinc_prime(double x) {
    if (std::abs(x) < 1e-3) return -x / 3.0 + x * x * x / 30.0;
    return (x * std::cos(x) - std::sin(x)) / (x * x);
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace jac

#endif // JAC_MATH_HPP
