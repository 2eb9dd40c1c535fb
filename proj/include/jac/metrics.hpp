// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef JAC_METRICS_HPP
#define JAC_METRICS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jac/array_model.hpp"
#include "jac/estimators.hpp"

namespace jac {

/// Rate with perfect channel state information: log2(1 + Ps*N/sigma2).
inline double rate_max(double ps, double sigma2, int n_antennas) {
    if (!(ps > 0.0) || !(sigma2 > 0.0) || n_antennas < 1)
        throw std::invalid_argument("rate_max: inputs must be positive");
    return std::log2(1.0 + ps * n_antennas / sigma2);
}

/// Achievable rate when beamforming with the estimated channel:
/// log2(1 + (Ps*N/sigma2) * |h^H h_hat|^2 / (||h_hat||^2 * ||h||^2)).
/// The ||h||^2 factor normalizes the beamforming gain so that a perfect
/// estimate attains rate_max exactly.
inline double achievable_rate(const Eigen::VectorXcd& h, const Eigen::VectorXcd& h_hat, double ps,
                              double sigma2) {
    if (h.size() != h_hat.size()) throw std::invalid_argument("achievable_rate: size mismatch");
    const double hh = h.squaredNorm();
    const double gg = h_hat.squaredNorm();
    if (!(gg > 0.0)) throw std::invalid_argument("achievable_rate: zero estimated channel");
    const double gain = std::norm(h.dot(h_hat)) / (gg * hh);
    return std::log2(1.0 + ps * static_cast<double>(h.size()) / sigma2 * gain);
}

/// ||h - h_hat||^2 / ||h||^2.
inline double nmse(const Eigen::VectorXcd& h, const Eigen::VectorXcd& h_hat) {
    if (h.size() != h_hat.size()) throw std::invalid_argument("nmse: size mismatch");
    const double hh = h.squaredNorm();
    if (!(hh > 0.0)) throw std::invalid_argument("nmse: zero reference channel");
    return (h - h_hat).squaredNorm() / hh;
}

/// 10*log10 of the mean linear NMSE over trials.
inline double aggregate_nmse_db(const std::vector<double>& nmse_values) {
    if (nmse_values.empty()) throw std::invalid_argument("aggregate_nmse_db: empty trial list");
    double acc = 0.0;
    for (double v : nmse_values) acc += v;
    return 10.0 * std::log10(acc / nmse_values.size());
}

/// Point in the xOz plane.
struct PlanePoint {
    double x = 0.0;
    double z = 0.0;
};

inline PlanePoint plane_point(const SourcePosition& pos) { return {pos.x(), pos.z()}; }

/// Mean squared position error (the squared-norm criterion).
inline double mse_position(const std::vector<std::pair<PlanePoint, PlanePoint>>& trials) {
    if (trials.empty()) throw std::invalid_argument("mse_position: empty trial list");
    double acc = 0.0;
    for (const auto& [truth, est] : trials) {
        const double dx = truth.x - est.x;
        const double dz = truth.z - est.z;
        acc += dx * dx + dz * dz;
    }
    return acc / trials.size();
}

/// Root of the mean squared position error.
inline double rmse_position(const std::vector<std::pair<PlanePoint, PlanePoint>>& trials) {
    return std::sqrt(mse_position(trials));
}

/// RMSE of a scalar quantity (theta and r are reported separately).
inline double rmse_scalar(const std::vector<std::pair<double, double>>& trials) {
    if (trials.empty()) throw std::invalid_argument("rmse_scalar: empty trial list");
    double acc = 0.0;
    for (const auto& [truth, est] : trials) acc += (truth - est) * (truth - est);
    return std::sqrt(acc / trials.size());
}

/// Everything the harness keeps per Monte-Carlo trial.
struct TrialOutcome {
    ChannelParams true_params;
    SourcePosition true_pos;
    Estimate estimate;
    double rate_bps_hz = 0.0;
    double rate_max_bps_hz = 0.0;
    double nmse = 0.0;
    std::optional<double> pos_err2_m2; // absent when the estimate is far-field
};

inline TrialOutcome evaluate_trial(const SourcePosition& pos, const Eigen::VectorXcd& h_true,
                                   Estimate estimate, double ps, double sigma2) {
    TrialOutcome out;
    out.true_params = params_from_position(pos);
    out.true_pos = pos;
    out.nmse = nmse(h_true, estimate.h_hat);
    if (sigma2 > 0.0) {
        out.rate_bps_hz = achievable_rate(h_true, estimate.h_hat, ps, sigma2);
        out.rate_max_bps_hz = rate_max(ps, sigma2, static_cast<int>(h_true.size()));
    } else {
        out.rate_bps_hz = std::numeric_limits<double>::infinity();
        out.rate_max_bps_hz = std::numeric_limits<double>::infinity();
    }
    if (estimate.r_m) {
        const double ex = *estimate.r_m * std::sin(estimate.theta_rad);
        const double ez = *estimate.r_m * std::cos(estimate.theta_rad);
        const double dx = pos.x() - ex;
        const double dz = pos.z() - ez;
        out.pos_err2_m2 = dx * dx + dz * dz;
    }
    out.estimate = std::move(estimate);
    return out;
}

} // namespace jac

#endif // JAC_METRICS_HPP
