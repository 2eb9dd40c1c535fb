// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_SPATIAL_AUTOCORR_HPP
#define JAC_SPATIAL_AUTOCORR_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jac/array_model.hpp"
#include "jac/math.hpp"

namespace jac {

/// Lag-domain magnitude autocorrelation of the received signal. For the
/// quadratic-phase channel the underlying model is
///   c(eta) = |sinc(k * p1 * eta * d^2 * (N - xi))|,
/// independent of p2 -- curvature and direction decouple here.

struct AutocorrSpectrum {
    std::vector<double> values; // c_hat[eta], eta = 1..xi at index eta-1
    int xi = 0;                 // lag count
    int window_len = 0;         // averaging window N - xi (antennas)
    int snapshots_used = 0;     // T

    double at(int eta) const { return values[static_cast<std::size_t>(eta) - 1]; }
};

/// c_hat[eta] = | (1/T) * (1/(N-xi)) * sum_t sum_{n=xi+1..N} Y[n,t]*conj(Y[n-eta,t]) |.
/// The complex products are averaged over both n and t before the magnitude
/// is taken. Every lag shares the fixed window n = xi+1..N. Summation order
/// is n-major then t, so results are bit-reproducible.
inline AutocorrSpectrum autocorr_spectrum(const Eigen::MatrixXcd& samples, int xi) {
    const int n_ant = static_cast<int>(samples.rows());
    const int snapshots = static_cast<int>(samples.cols());
    if (xi < 1 || xi > n_ant - 1)
        throw std::invalid_argument("autocorr_spectrum: xi must be in [1, N-1]");

    AutocorrSpectrum out;
    out.xi = xi;
    out.window_len = n_ant - xi;
    out.snapshots_used = snapshots;
    out.values.resize(static_cast<std::size_t>(xi));

    const double norm = 1.0 / (static_cast<double>(snapshots) * out.window_len);
    for (int eta = 1; eta <= xi; ++eta) {
        std::complex<double> acc{0.0, 0.0};
        for (int n = xi + 1; n <= n_ant; ++n)
            for (int t = 0; t < snapshots; ++t)
                acc += samples(n - 1, t) * std::conj(samples(n - 1 - eta, t));
        out.values[static_cast<std::size_t>(eta) - 1] = std::abs(acc * norm);
    }
    return out;
}

inline AutocorrSpectrum autocorr_spectrum(const ReceivedSignal& y, int xi) {
    return autocorr_spectrum(y.samples, xi);
}

/// Theoretical spectrum |sinc(k * p1 * eta * d^2 * (N - xi))| for lag eta.
inline double model_autocorr(double p1, int eta, const ArrayConfig& cfg, int xi) {
    const double d = cfg.spacing_m;
    const double arg = cfg.wavenumber * p1 * eta * d * d * (cfg.n_antennas - xi);
    return std::abs(sinc(arg));
}

/// Default lag count floor(N/2).
inline int default_xi(int n_antennas) { return n_antennas / 2; }

} // namespace jac

#endif // JAC_SPATIAL_AUTOCORR_HPP
