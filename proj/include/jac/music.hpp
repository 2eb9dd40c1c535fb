// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_MUSIC_HPP
#define JAC_MUSIC_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jac/array_model.hpp"
#include "jac/math.hpp"

namespace jac {

/// Single-source MUSIC over the direction parameter p2 = sin(theta). With one
/// line-of-sight source the noise-subspace projector is I - u1*u1^H, so only
/// the dominant eigenvector of the sample covariance is needed; it is obtained
/// matrix-free from Y (cost O(N*T) per iteration, never forming the N x N
/// covariance), keeping the whole step at O(N*T + N*grid).

struct MusicConfig {
    int grid_size = 4096; // p2 grid points over (-1, 1), >= 16
    bool refine = true;   // parabolic interpolation of the log-pseudospectrum peak
    int signal_dim = 1;   // signal-subspace dimension, 1 <= dim < N
};

/// R_hat = (1/T) * Y * Y^H, symmetrized to be exactly Hermitian.
inline Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& samples) {
    if (samples.cols() < 1) throw std::invalid_argument("sample_covariance: need T >= 1");
    Eigen::MatrixXcd r = samples * samples.adjoint() / static_cast<double>(samples.cols());
    return 0.5 * (r + r.adjoint());
}

namespace detail {

/// Dominant eigenvector of (1/T) Y Y^H by power iteration on Y, started from
/// the first nonzero column. Throws on non-convergence.
inline Eigen::VectorXcd dominant_eigvec(const Eigen::MatrixXcd& samples, double tol = 1e-12,
                                        int max_iter = 10000, double* eigval_out = nullptr) {
    const auto cols = samples.cols();
    Eigen::VectorXcd v;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double nrm = samples.col(c).norm();
        if (nrm > 0.0) {
            v = samples.col(c) / nrm;
            break;
        }
    }
    if (v.size() == 0)
        throw std::runtime_error("music: power iteration undefined for all-zero input");

    const double t_inv = 1.0 / static_cast<double>(cols);
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = samples * (samples.adjoint() * v) * t_inv;
        const double nrm = w.norm();
        if (nrm == 0.0)
            throw std::runtime_error("music: power iteration collapsed to zero vector");
        w /= nrm;
        const double delta = (w - v).norm();
        lambda = nrm;
        v.swap(w);
        if (delta < tol) {
            if (eigval_out) *eigval_out = lambda;
            return v;
        }
    }
    throw std::runtime_error("music: power iteration did not converge");
}

/// Deflated power iteration on an explicit Hermitian matrix (used only when
/// signal_dim > 1).
inline Eigen::VectorXcd dominant_eigvec_dense(const Eigen::MatrixXcd& r, double tol, int max_iter,
                                              double* eigval_out) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(r.rows());
    v[0] = 1.0;
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = r * v;
        const double nrm = w.norm();
        if (nrm == 0.0) throw std::runtime_error("music: power iteration collapsed to zero vector");
        w /= nrm;
        const double delta = (w - v).norm();
        lambda = nrm;
        v.swap(w);
        if (delta < tol) {
            if (eigval_out) *eigval_out = lambda;
            return v;
        }
    }
    throw std::runtime_error("music: power iteration did not converge");
}

} // namespace detail

/// p2 grid point g of G: -1 + (2g+1)/G; endpoints excluded (|theta| < pi/2).
inline double music_grid_point(int g, int grid_size) {
    return -1.0 + (2.0 * g + 1.0) / grid_size;
}

/// MUSIC estimate of p2 from the (already curvature-compensated) signal.
/// Pseudospectrum P(p2) = 1 / (a^H (I - U U^H) a) with steering
/// a[n] = exp(j*k*p2*n*d). Returns the grid argmax (ties: lowest index),
/// parabolically refined on the log-pseudospectrum when enabled. When
/// spectrum_out is non-null it receives (p2, pseudospectrum) rows.
inline double estimate_p2_music(const Eigen::MatrixXcd& samples, const ArrayConfig& cfg,
                                const MusicConfig& mcfg = {},
                                std::vector<std::pair<double, double>>* spectrum_out = nullptr) {
    const int n_ant = static_cast<int>(samples.rows());
    if (n_ant != cfg.n_antennas)
        throw std::invalid_argument("estimate_p2_music: sample rows != n_antennas");
    if (mcfg.grid_size < 16) throw std::invalid_argument("estimate_p2_music: grid_size < 16");
    if (mcfg.signal_dim < 1 || mcfg.signal_dim >= n_ant)
        throw std::invalid_argument("estimate_p2_music: signal_dim out of range");

    std::vector<Eigen::VectorXcd> basis;
    if (mcfg.signal_dim == 1) {
        basis.push_back(detail::dominant_eigvec(samples));
    } else {
        Eigen::MatrixXcd r = sample_covariance(samples);
        for (int i = 0; i < mcfg.signal_dim; ++i) {
            double lambda = 0.0;
            Eigen::VectorXcd u = detail::dominant_eigvec_dense(r, 1e-12, 10000, &lambda);
            basis.push_back(u);
            r -= lambda * u * u.adjoint();
        }
    }

    const int grid = mcfg.grid_size;
    std::vector<double> denom(static_cast<std::size_t>(grid));
    const double kd = cfg.wavenumber * cfg.spacing_m;
    int best = 0;
    double best_denom = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        const double p2 = music_grid_point(g, grid);
        // a^H u accumulated with an incremental phasor: conj(a[n]) = w^n.
        const std::complex<double> w = std::polar(1.0, -kd * p2);
        double proj = 0.0;
        for (const auto& u : basis) {
            std::complex<double> acc{0.0, 0.0};
            std::complex<double> ph = w;
            for (int n = 0; n < n_ant; ++n) {
                acc += ph * u[n];
                ph *= w;
            }
            proj += std::norm(acc);
        }
        double dn = static_cast<double>(n_ant) - proj;
        if (dn < 1e-15 * n_ant) dn = 1e-15 * n_ant; // numerically exact match
        denom[static_cast<std::size_t>(g)] = dn;
        if (dn < best_denom) {
            best_denom = dn;
            best = g;
        }
    }

    if (spectrum_out) {
        spectrum_out->clear();
        spectrum_out->reserve(static_cast<std::size_t>(grid));
        for (int g = 0; g < grid; ++g)
            spectrum_out->emplace_back(music_grid_point(g, grid),
                                       1.0 / denom[static_cast<std::size_t>(g)]);
    }

    double p2_hat = music_grid_point(best, grid);
    if (mcfg.refine && best > 0 && best < grid - 1) {
        // Parabola through the log-pseudospectrum at the peak and neighbours.
        const double lm = -std::log(denom[static_cast<std::size_t>(best) - 1]);
        const double l0 = -std::log(denom[static_cast<std::size_t>(best)]);
        const double lp = -std::log(denom[static_cast<std::size_t>(best) + 1]);
        const double curv = lm - 2.0 * l0 + lp;
        if (curv < 0.0) {
            const double offset = 0.5 * (lm - lp) / curv;
            if (std::isfinite(offset) && std::abs(offset) <= 0.5)
                p2_hat += offset * 2.0 / grid;
        }
    }
    return p2_hat;
}

} // namespace jac

#endif // JAC_MUSIC_HPP
