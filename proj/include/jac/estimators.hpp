// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_ESTIMATORS_HPP
#define JAC_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jac/array_model.hpp"
#include "jac/math.hpp"
#include "jac/music.hpp"
#include "jac/spatial_autocorr.hpp"

namespace jac {

/// Curvature (p1) estimators built on the autocorrelation spectrum, the
/// equivalent far-field transform, and the end-to-end channel/position
/// estimation pipeline. Two p1 estimators are provided: direct inversion of
/// the |sinc| model over its main lobe (ISF) and an L1 model fit by gradient
/// descent (GD).

// ---------------------------------------------------------------------------
// arcsinc

/// Inverse of sinc restricted to its monotone branch y in [-pi, 0], where
/// sinc rises from 0 to 1. Bisection to |sinc(y) - c| < 1e-12. Inputs outside
/// [0, 1] by more than 1e-9 are a domain error; closer ones are clamped.
inline double arcsinc(double c) {
    if (!(c >= -1e-9 && c <= 1.0 + 1e-9))
        throw std::domain_error("arcsinc: argument outside [0, 1]");
    c = std::clamp(c, 0.0, 1.0);
    if (c == 1.0) return 0.0;
    if (c == 0.0) return -kPi;
    double lo = -kPi, hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = sinc(mid);
        if (std::abs(val - c) < 1e-13) return mid;
        if (val < c)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// ISF

struct IsfConfig {
    double delta = 0.1; // main-lobe threshold
    int xi = 0;         // lag count; 0 selects floor(N/2)
};

/// First lag at or below delta; xi when the spectrum never drops that far.
inline int mainlobe_cutoff(const AutocorrSpectrum& c_hat, double delta) {
    for (int eta = 1; eta <= c_hat.xi; ++eta)
        if (c_hat.at(eta) <= delta) return eta;
    return c_hat.xi;
}

/// p1_hat = (1/N_eta) * sum_eta arcsinc(c_hat[eta]) / (k * eta * d^2 * W),
/// W = N - xi. Spectrum entries are clamped into [0, 1] before inversion.
/// Non-positive by construction.
inline double estimate_p1_isf(const AutocorrSpectrum& c_hat, const ArrayConfig& cfg,
                              const IsfConfig& isf = {}) {
    const int n_eta = mainlobe_cutoff(c_hat, isf.delta);
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * c_hat.window_len;
    double acc = 0.0;
    for (int eta = 1; eta <= n_eta; ++eta) {
        const double c = std::clamp(c_hat.at(eta), 0.0, 1.0);
        acc += arcsinc(c) / (scale * eta);
    }
    return acc / n_eta;
}

// ---------------------------------------------------------------------------
// GD

enum class WarmStart { none, isf };
enum class GradientMode { analytic, central_difference };

struct GdConfig {
    double alpha0 = 1e-2;                       // initial learning rate (rescaled variable)
    double gamma = 0.05;                        // inverse-time decay factor
    int n_itr = 300;                            // iteration budget
    WarmStart warm_start = WarmStart::isf;      // none starts from p1_init
    GradientMode gradient_mode = GradientMode::analytic;
    double p1_init = 0.0;
};

/// L1 fit of the spectrum to the |sinc| model over all xi lags:
/// Loss = sum_eta | c_hat[eta] - |sinc(k * p1 * eta * d^2 * (N - xi))| |.
inline double gd_loss(double p1, const AutocorrSpectrum& c_hat, const ArrayConfig& cfg) {
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * c_hat.window_len;
    double loss = 0.0;
    for (int eta = 1; eta <= c_hat.xi; ++eta)
        loss += std::abs(c_hat.at(eta) - std::abs(sinc(scale * eta * p1)));
    return loss;
}

/// dLoss/dp1. The analytic form treats sign(0) = 0 and evaluates the p1 -> 0
/// limit of each term as 0; central differences use step 1e-9 * max(1, |p1|).
inline double gd_gradient(double p1, const AutocorrSpectrum& c_hat, const ArrayConfig& cfg,
                          GradientMode mode = GradientMode::analytic) {
    if (mode == GradientMode::central_difference) {
        const double h = 1e-9 * std::max(1.0, std::abs(p1));
        return (gd_loss(p1 + h, c_hat, cfg) - gd_loss(p1 - h, c_hat, cfg)) / (2.0 * h);
    }
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * c_hat.window_len;
    double grad = 0.0;
    for (int eta = 1; eta <= c_hat.xi; ++eta) {
        const double a = scale * eta;
        const double u = a * p1;
        const double s = sinc(u);
        grad += -sign(c_hat.at(eta) - std::abs(s)) * sign(s) * a * sinc_prime(u);
    }
    return grad;
}

struct GdResult {
    double p1_hat = 0.0;
    int iterations = 0;
    double final_loss = 0.0; // loss of the returned (best) iterate
    bool aborted = false;    // non-finite gradient encountered
};

/// Gradient descent with inverse-time-decay learning rate
/// alpha(n) = alpha0 / (1 + gamma*(n-1)), run on the rescaled variable
/// u = k*d^2*(N-xi)*p1 with the gradient normalized by sum(eta); this keeps
/// the step size conditioned independently of N, d and lambda. Returns the
/// iterate with the lowest observed loss.
inline GdResult estimate_p1_gd(const AutocorrSpectrum& c_hat, const ArrayConfig& cfg,
                               const GdConfig& gd = {}, const IsfConfig& isf = {}) {
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * c_hat.window_len; // u = scale * p1
    const double weight = 0.5 * static_cast<double>(c_hat.xi) * (c_hat.xi + 1);

    double p1 = gd.warm_start == WarmStart::isf ? estimate_p1_isf(c_hat, cfg, isf) : gd.p1_init;
    double u = scale * p1;

    GdResult res;
    double best_u = u;
    double best_loss = gd_loss(u / scale, c_hat, cfg);
    for (int n = 1; n <= gd.n_itr; ++n) {
        const double grad_p1 = gd_gradient(u / scale, c_hat, cfg, gd.gradient_mode);
        if (!std::isfinite(grad_p1)) {
            res.aborted = true;
            break;
        }
        const double alpha = gd.alpha0 / (1.0 + gd.gamma * (n - 1));
        u -= alpha * grad_p1 / (scale * weight);
        const double loss = gd_loss(u / scale, c_hat, cfg);
        if (loss < best_loss) {
            best_loss = loss;
            best_u = u;
        }
        res.iterations = n;
    }
    // The model is even in p1; report the physical (non-positive) branch.
    res.p1_hat = -std::abs(best_u) / scale;
    res.final_loss = best_loss;
    return res;
}

// ---------------------------------------------------------------------------
// Equivalent far-field transform

/// Removes the estimated quadratic phase: Yt[n,t] = exp(-j*k*p1_hat*(n*d)^2) * Y[n,t].
/// The conjugate sign cancels the quadratic term of the channel phase;
/// paper_literal_sign applies exp(+j*k*p1_hat*x^2) instead, which doubles it
/// (kept for comparison).
inline Eigen::MatrixXcd equivalent_farfield(const Eigen::MatrixXcd& samples, double p1_hat,
                                            const ArrayConfig& cfg,
                                            bool paper_literal_sign = false) {
    const double s = paper_literal_sign ? 1.0 : -1.0;
    Eigen::MatrixXcd out(samples.rows(), samples.cols());
    for (int n = 1; n <= static_cast<int>(samples.rows()); ++n) {
        const double x = cfg.element_x(n);
        const std::complex<double> w = std::polar(1.0, s * cfg.wavenumber * p1_hat * x * x);
        out.row(n - 1) = samples.row(n - 1) * w;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum power normalization

/// How the raw autocorrelation spectrum is scaled to the unit-power form the
/// |sinc| model assumes.
enum class PowerNorm {
    signal_power, // lag-1-referenced signal power with a one-step sinc correction
    lag0,         // total sample power (signal + noise) over the window
    none          // assume unit transmit power
};

namespace detail {

inline double lag0_power(const Eigen::MatrixXcd& samples, int xi) {
    const int n_ant = static_cast<int>(samples.rows());
    const int snapshots = static_cast<int>(samples.cols());
    double acc = 0.0;
    for (int n = xi + 1; n <= n_ant; ++n)
        for (int t = 0; t < snapshots; ++t) acc += std::norm(samples(n - 1, t));
    return acc / (static_cast<double>(snapshots) * (n_ant - xi));
}

} // namespace detail

/// Scales the spectrum so that it estimates the unit-power model. The
/// signal_power mode references the lag-1 value (noise drops out of lags
/// >= 1, so this does not inherit the noise-power inflation of the lag-0
/// power) and corrects its own sinc attenuation with a provisional ISF pass.
inline AutocorrSpectrum normalize_spectrum(AutocorrSpectrum c_hat, const Eigen::MatrixXcd& samples,
                                           PowerNorm mode, const ArrayConfig& cfg,
                                           const IsfConfig& isf = {}) {
    double power = 1.0;
    switch (mode) {
        case PowerNorm::none:
            return c_hat;
        case PowerNorm::lag0:
            power = detail::lag0_power(samples, c_hat.xi);
            break;
        case PowerNorm::signal_power: {
            const double c1 = c_hat.at(1);
            if (c1 > 0.0) {
                AutocorrSpectrum provisional = c_hat;
                for (auto& v : provisional.values) v /= c1;
                const double p1_prov = estimate_p1_isf(provisional, cfg, isf);
                const double corr =
                    std::max(0.5, model_autocorr(p1_prov, 1, cfg, c_hat.xi));
                power = c1 / corr;
            } else {
                power = detail::lag0_power(samples, c_hat.xi);
            }
            break;
        }
    }
    if (power > 0.0)
        for (auto& v : c_hat.values) v /= power;
    return c_hat;
}

// ---------------------------------------------------------------------------
// End-to-end estimate

enum class CoaMethod { isf, gd };

struct EstimateDiagnostics {
    int n_eta = 0;          // main-lobe cutoff used by ISF (0 for GD-only paths)
    double final_loss = 0.0;
    int iterations = 0;
    bool gd_aborted = false;
    std::string method_tag;
};

struct Estimate {
    double p1_hat = 0.0;
    double p2_hat = 0.0;
    double theta_rad = 0.0;
    std::optional<double> r_m; // nullopt: far field
    Eigen::VectorXcd h_hat;
    EstimateDiagnostics diagnostics;
};

struct JacConfig {
    IsfConfig isf{};
    GdConfig gd{};
    MusicConfig music{};
    PowerNorm norm = PowerNorm::signal_power;
    bool paper_literal_sign = false;
    double p1_floor = 1e-8; // |p1| below this resolves to the far-field sentinel
};

/// Reconstructed channel exp(j*k*(p1*x^2 + p2*x)); unit modulus per entry.
inline Eigen::VectorXcd reconstruct_channel(const ArrayConfig& cfg, double p1_hat, double p2_hat) {
    return channel_quadratic(cfg, ChannelParams{p1_hat, p2_hat});
}

/// Full pipeline: autocorrelation -> p1 (ISF or GD) -> equivalent far-field
/// transform -> MUSIC p2 -> channel reconstruction and position recovery.
inline Estimate jac_estimate(const Eigen::MatrixXcd& samples, const ArrayConfig& cfg,
                             CoaMethod method, const JacConfig& jc = {}) {
    if (samples.rows() != cfg.n_antennas)
        throw std::invalid_argument("jac_estimate: sample rows != n_antennas");
    const int xi = jc.isf.xi > 0 ? jc.isf.xi : default_xi(cfg.n_antennas);

    AutocorrSpectrum c_hat = autocorr_spectrum(samples, xi);
    c_hat = normalize_spectrum(std::move(c_hat), samples, jc.norm, cfg, jc.isf);

    Estimate est;
    est.diagnostics.n_eta = mainlobe_cutoff(c_hat, jc.isf.delta);
    if (method == CoaMethod::isf) {
        est.p1_hat = estimate_p1_isf(c_hat, cfg, jc.isf);
        est.diagnostics.final_loss = gd_loss(est.p1_hat, c_hat, cfg);
        est.diagnostics.method_tag = "jac_isf";
    } else {
        const GdResult gd = estimate_p1_gd(c_hat, cfg, jc.gd, jc.isf);
        est.p1_hat = gd.p1_hat;
        est.diagnostics.final_loss = gd.final_loss;
        est.diagnostics.iterations = gd.iterations;
        est.diagnostics.gd_aborted = gd.aborted;
        est.diagnostics.method_tag = "jac_gd";
    }

    const Eigen::MatrixXcd farfield =
        equivalent_farfield(samples, est.p1_hat, cfg, jc.paper_literal_sign);
    est.p2_hat = estimate_p2_music(farfield, cfg, jc.music);
    est.h_hat = reconstruct_channel(cfg, est.p1_hat, est.p2_hat);

    const PositionResult pos = position_from_params({est.p1_hat, est.p2_hat}, jc.p1_floor);
    est.theta_rad = pos.theta_rad;
    est.r_m = pos.r_m;
    return est;
}

} // namespace jac

#endif // JAC_ESTIMATORS_HPP
