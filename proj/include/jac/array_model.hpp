// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_ARRAY_MODEL_HPP
#define JAC_ARRAY_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "jac/math.hpp"
#include "jac/random.hpp"

namespace jac {

/// Uplink channel model: a single-antenna user at distance r and elevation
/// theta from a uniform linear array on the x-axis. Element n (n = 1..N) sits
/// at x_n = n*d; the phase reference is the origin. The line-of-sight channel
/// phase, expanded around the reference, is k*(p1*x^2 + p2*x) with
/// p1 = -cos^2(theta)/(2r) (curvature; CoA = 2*p1) and p2 = sin(theta) (AoA).

// ---------------------------------------------------------------------------
// Geometry / configuration

struct ArrayConfig {
    int n_antennas = 0;        // N >= 2
    double spacing_m = 0.0;    // d > 0
    double carrier_hz = 0.0;   // f
    bool ideal_c = false;      // use c = 3e8 (round-number wavelength)
    double wavelength_m = 0.0; // lambda = c/f
    double wavenumber = 0.0;   // k = 2*pi/lambda

    /// spacing_m <= 0 selects half-wavelength spacing.
    static ArrayConfig make(int n_antennas, double carrier_hz,
                            double spacing_m = 0.0, bool ideal_c = false) {
        if (n_antennas < 2) throw std::invalid_argument("ArrayConfig: need at least 2 antennas");
        if (carrier_hz <= 0.0) throw std::invalid_argument("ArrayConfig: carrier must be positive");
        ArrayConfig cfg;
        cfg.n_antennas = n_antennas;
        cfg.carrier_hz = carrier_hz;
        cfg.ideal_c = ideal_c;
        const double c = ideal_c ? kSpeedOfLightIdeal : kSpeedOfLight;
        cfg.wavelength_m = c / carrier_hz;
        cfg.spacing_m = spacing_m > 0.0 ? spacing_m : 0.5 * cfg.wavelength_m;
        cfg.wavenumber = kTwoPi / cfg.wavelength_m;
        return cfg;
    }

    double aperture_m() const { return n_antennas * spacing_m; }

    /// x-coordinate of element n, n = 1..N.
    double element_x(int n) const { return n * spacing_m; }
};

/// Far/near-field boundary 2*(N*d)^2 / lambda.
inline double rayleigh_distance(const ArrayConfig& cfg) {
    const double d_ap = cfg.aperture_m();
    return 2.0 * d_ap * d_ap / cfg.wavelength_m;
}

/// Lower edge of the Fresnel region, 0.62*sqrt(D^3/lambda); below it the
/// quadratic phase model is no longer trusted.
inline double fresnel_lower_bound(const ArrayConfig& cfg) {
    const double d_ap = cfg.aperture_m();
    return 0.62 * std::sqrt(d_ap * d_ap * d_ap / cfg.wavelength_m);
}

// ---------------------------------------------------------------------------
// Source position and channel parameters

struct SourcePosition {
    double r_m = 0.0;       // distance from the reference antenna (origin)
    double theta_rad = 0.0; // elevation, |theta| < pi/2

    static SourcePosition polar(double r_m, double theta_rad) {
        if (!(r_m > 0.0)) throw std::invalid_argument("SourcePosition: r must be positive");
        if (!(std::abs(theta_rad) < kPi / 2.0))
            throw std::invalid_argument("SourcePosition: |theta| must be < pi/2");
        return SourcePosition{r_m, theta_rad};
    }

    static SourcePosition cartesian(double p_x, double p_z) {
        const double r = std::hypot(p_x, p_z);
        return polar(r, std::atan2(p_x, p_z));
    }

    double x() const { return r_m * std::sin(theta_rad); }
    double z() const { return r_m * std::cos(theta_rad); }
};

struct ChannelParams {
    double p1 = 0.0; // curvature parameter, 1/m; 0 encodes far field
    double p2 = 0.0; // sin(AoA), in (-1, 1)
};

inline ChannelParams params_from_position(const SourcePosition& pos) {
    const double c = std::cos(pos.theta_rad);
    return ChannelParams{-c * c / (2.0 * pos.r_m), std::sin(pos.theta_rad)};
}

/// Position recovered from channel parameters; r is absent when the curvature
/// is too small to resolve a distance (far field).
struct PositionResult {
    double theta_rad = 0.0;
    std::optional<double> r_m; // nullopt: far-field, distance unresolvable

    bool far_field() const { return !r_m.has_value(); }
};

inline PositionResult position_from_params(const ChannelParams& par, double p1_floor = 1e-8) {
    const double p2 = std::clamp(par.p2, -1.0, 1.0);
    const double theta = std::asin(p2);
    PositionResult out;
    out.theta_rad = theta;
    if (par.p1 < -p1_floor) {
        const double c = std::cos(theta);
        out.r_m = -c * c / (2.0 * par.p1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Channel synthesis

/// Quadratic-phase channel h[n] = exp(j*k*(p1*x_n^2 + p2*x_n)), x_n = n*d.
/// p1 = 0 degenerates to the far-field steering vector.
inline Eigen::VectorXcd channel_quadratic(const ArrayConfig& cfg, const ChannelParams& par) {
    Eigen::VectorXcd h(cfg.n_antennas);
    for (int n = 1; n <= cfg.n_antennas; ++n) {
        const double x = cfg.element_x(n);
        h[n - 1] = std::polar(1.0, cfg.wavenumber * (par.p1 * x * x + par.p2 * x));
    }
    return h;
}

/// Exact relative path delay ||p - x|| - ||p|| for a probe point at (x, 0, 0),
/// evaluated in a cancellation-free form.
inline double exact_delay_m(const SourcePosition& pos, double x) {
    const double r = pos.r_m;
    const double s = std::sin(pos.theta_rad);
    const double dist = std::sqrt(r * r - 2.0 * r * s * x + x * x);
    return (x * x - 2.0 * r * s * x) / (dist + r);
}

/// Exact spherical-wave channel h[n] = exp(-j*k*(||p - x_n|| - ||p||)).
inline Eigen::VectorXcd channel_exact(const ArrayConfig& cfg, const SourcePosition& pos) {
    Eigen::VectorXcd h(cfg.n_antennas);
    for (int n = 1; n <= cfg.n_antennas; ++n)
        h[n - 1] = std::polar(1.0, -cfg.wavenumber * exact_delay_m(pos, cfg.element_x(n)));
    return h;
}

/// Local channel direction beta(x) = d(phase)/dx / k = 2*p1*x + p2.
inline double local_direction(const ChannelParams& par, double x) {
    return 2.0 * par.p1 * x + par.p2;
}

// ---------------------------------------------------------------------------
// Received-signal synthesis

enum class ChannelModel { exact, quadratic };

inline const char* to_string(ChannelModel m) {
    return m == ChannelModel::exact ? "exact" : "quadratic";
}

struct ReceivedSignal {
    Eigen::MatrixXcd samples; // N x T
    double snr_db = std::numeric_limits<double>::infinity();
    double sigma2 = 0.0; // per-entry noise power, Ps/SNR with Ps = 1
    std::uint64_t seed = 0;
    ChannelModel model = ChannelModel::exact;
};

/// Y = h s^H + noise with unit-amplitude symbols s(t) = exp(j*psi_t),
/// psi_t i.i.d. uniform, and i.i.d. circular complex Gaussian noise of
/// variance sigma2 = 1/10^(snr_db/10) per entry. Pure function of its
/// arguments; snr_db = +inf disables the noise draw.
inline ReceivedSignal synthesize_received(const ArrayConfig& cfg, const SourcePosition& pos,
                                          int snapshots, double snr_db, std::uint64_t seed,
                                          ChannelModel model = ChannelModel::exact) {
    if (snapshots < 1) throw std::invalid_argument("synthesize_received: need at least 1 snapshot");
    const Eigen::VectorXcd h = model == ChannelModel::exact
                                   ? channel_exact(cfg, pos)
                                   : channel_quadratic(cfg, params_from_position(pos));
    ReceivedSignal out;
    out.snr_db = snr_db;
    out.sigma2 = std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);
    out.seed = seed;
    out.model = model;
    out.samples.resize(cfg.n_antennas, snapshots);

    RandomStream rng(seed);
    // Symbol phases are drawn before any noise so that the noiseless signal
    // generated from the same seed shares the same symbol sequence.
    for (int t = 0; t < snapshots; ++t) {
        const std::complex<double> s_conj = std::polar(1.0, -rng.phase());
        out.samples.col(t) = h * s_conj;
    }
    if (out.sigma2 > 0.0) {
        for (int t = 0; t < snapshots; ++t)
            for (int n = 0; n < cfg.n_antennas; ++n)
                out.samples(n, t) += rng.circular_gaussian(out.sigma2);
    }
    return out;
}

} // namespace jac

#endif // JAC_ARRAY_MODEL_HPP
