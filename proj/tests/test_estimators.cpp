// SPDX-License-Identifier: Apache-2.0
//
// jac: near-field channel and position estimation on uniform linear arrays
// Copyright (C) 2026 the jac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>

#include "jac/estimators.hpp"

using namespace jac;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ArrayConfig paper_array(int n = 200) { return ArrayConfig::make(n, 30e9, 0.0, true); }

Eigen::MatrixXcd noiseless_quadratic(const ArrayConfig& cfg, double r, double theta_deg, int t,
                                     std::uint64_t seed) {
    const SourcePosition pos = SourcePosition::polar(r, deg_to_rad(theta_deg));
    return synthesize_received(cfg, pos, t, kInf, seed, ChannelModel::quadratic).samples;
}

// Spectrum built with the same expression gd_loss evaluates, so that
// residuals at the generating p1 are exactly zero.
AutocorrSpectrum spectrum_from_model(const ArrayConfig& cfg, double p1, int xi) {
    AutocorrSpectrum c;
    c.xi = xi;
    c.window_len = cfg.n_antennas - xi;
    c.snapshots_used = 1;
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * c.window_len;
    for (int eta = 1; eta <= xi; ++eta)
        c.values.push_back(std::abs(sinc(scale * eta * p1)));
    return c;
}

AutocorrSpectrum flat_spectrum(const ArrayConfig& cfg, int xi, double value) {
    AutocorrSpectrum c;
    c.xi = xi;
    c.window_len = cfg.n_antennas - xi;
    c.snapshots_used = 1;
    c.values.assign(static_cast<std::size_t>(xi), value);
    return c;
}

double nmse_of(const Eigen::VectorXcd& h, const Eigen::VectorXcd& h_hat) {
    return (h - h_hat).squaredNorm() / h.squaredNorm();
}

} // namespace

TEST_CASE("arcsinc") {
    SECTION("endpoints are exact") {
        CHECK(arcsinc(1.0) == 0.0);
        CHECK(arcsinc(0.0) == -kPi);
    }
    SECTION("inverts sin(1)/1 to -1") {
        CHECK(arcsinc(std::sin(1.0) / 1.0) == Catch::Approx(-1.0).margin(1e-9));
    }
    SECTION("is a right inverse of sinc on the branch") {
        RandomStream rng(3);
        for (int i = 0; i < 50; ++i) {
            const double c = rng.uniform01();
            const double y = arcsinc(c);
            CHECK(y <= 0.0);
            CHECK(y >= -kPi);
            CHECK(std::abs(sinc(y) - c) < 1e-12);
        }
    }
    SECTION("domain is validated after the clamping tolerance") {
        CHECK_THROWS_AS(arcsinc(1.1), std::domain_error);
        CHECK_THROWS_AS(arcsinc(-0.1), std::domain_error);
        CHECK_NOTHROW(arcsinc(1.0 + 1e-10));
        CHECK_NOTHROW(arcsinc(-1e-10));
    }
}

TEST_CASE("mainlobe cutoff") {
    const ArrayConfig cfg = paper_array(8);
    AutocorrSpectrum c = flat_spectrum(cfg, 4, 0.0);
    SECTION("first index at or below the threshold") {
        c.values = {0.9, 0.5, 0.05, 0.3};
        CHECK(mainlobe_cutoff(c, 0.1) == 3);
    }
    SECTION("spectrum above the threshold keeps all lags") {
        c.values = {0.9, 0.8, 0.7, 0.6};
        CHECK(mainlobe_cutoff(c, 0.1) == 4);
    }
    SECTION("immediate drop keeps one lag") {
        c.values = {0.05, 0.9, 0.9, 0.9};
        CHECK(mainlobe_cutoff(c, 0.1) == 1);
    }
}

TEST_CASE("isf estimator") {
    const ArrayConfig cfg = paper_array();
    const int xi = default_xi(cfg.n_antennas);
    SECTION("flat unit spectrum gives zero curvature") {
        CHECK(estimate_p1_isf(flat_spectrum(cfg, xi, 1.0), cfg) == 0.0);
    }
    SECTION("noiseless quadratic channel is recovered within 5%") {
        const double p1 = params_from_position(SourcePosition::polar(20.0, deg_to_rad(30.0))).p1;
        const Eigen::MatrixXcd y = noiseless_quadratic(cfg, 20.0, 30.0, 1, 77);
        const double p1_hat = estimate_p1_isf(autocorr_spectrum(y, xi), cfg);
        CHECK(std::abs(p1_hat - p1) / std::abs(p1) < 0.05);
        CHECK(p1_hat <= 0.0);
    }
    SECTION("single-lag path") {
        AutocorrSpectrum c = flat_spectrum(cfg, xi, 0.02);
        const double d = cfg.spacing_m;
        const double expected = arcsinc(0.02) / (cfg.wavenumber * d * d * c.window_len);
        CHECK(estimate_p1_isf(c, cfg) == Catch::Approx(expected).epsilon(1e-12));
    }
    SECTION("entries above one are clamped before inversion") {
        AutocorrSpectrum c = flat_spectrum(cfg, xi, 1.02);
        CHECK(estimate_p1_isf(c, cfg) == 0.0);
    }
}

TEST_CASE("gd loss") {
    const ArrayConfig cfg = paper_array();
    const int xi = default_xi(cfg.n_antennas);
    SECTION("zero for a flat unit spectrum at p1 = 0") {
        CHECK(gd_loss(0.0, flat_spectrum(cfg, xi, 1.0), cfg) == 0.0);
    }
    SECTION("non-negative everywhere") {
        RandomStream rng(4);
        const AutocorrSpectrum c = spectrum_from_model(cfg, -0.02, xi);
        for (int i = 0; i < 20; ++i) CHECK(gd_loss(rng.uniform(-0.1, 0.1), c, cfg) >= 0.0);
    }
    SECTION("discretization floor: sampled spectrum stays close to the model") {
        const double p1 = params_from_position(SourcePosition::polar(20.0, deg_to_rad(30.0))).p1;
        const Eigen::MatrixXcd y = noiseless_quadratic(cfg, 20.0, 30.0, 1, 6);
        const AutocorrSpectrum c = autocorr_spectrum(y, xi);
        CHECK(gd_loss(p1, c, cfg) < 0.02 * xi);
    }
}

TEST_CASE("gd gradient") {
    const ArrayConfig cfg = paper_array();
    const int xi = default_xi(cfg.n_antennas);
    const double d = cfg.spacing_m;
    const double scale = cfg.wavenumber * d * d * (cfg.n_antennas - xi);

    SECTION("flat unit spectrum has zero gradient at the origin") {
        CHECK(gd_gradient(0.0, flat_spectrum(cfg, xi, 1.0), cfg) == 0.0);
    }
    SECTION("analytic and central-difference modes agree away from kinks") {
        RandomStream rng(12);
        int tested = 0;
        while (tested < 50) {
            const AutocorrSpectrum c = spectrum_from_model(cfg, rng.uniform(-0.05, -0.005), xi);
            const double p1 = rng.uniform(-0.06, -0.002);
            bool near_kink = false;
            for (int eta = 1; eta <= xi; ++eta) {
                const double s = sinc(scale * eta * p1);
                if (std::abs(s) < 1e-6 || std::abs(c.at(eta) - std::abs(s)) < 1e-6)
                    near_kink = true;
            }
            if (near_kink) continue;
            const double ga = gd_gradient(p1, c, cfg, GradientMode::analytic);
            const double gfd = gd_gradient(p1, c, cfg, GradientMode::central_difference);
            if (std::abs(ga) < 1e-2) continue; // near-stationary draws have no stable relative error
            CHECK(std::abs(ga - gfd) < 1e-5 * std::abs(ga));
            ++tested;
        }
    }
    SECTION("gradient vanishes at the minimum of a model-exact spectrum") {
        const double p1 = -0.0135;
        const AutocorrSpectrum c = spectrum_from_model(cfg, p1, xi);
        double sum_a = 0.0;
        for (int eta = 1; eta <= xi; ++eta) sum_a += scale * eta;
        CHECK(std::abs(gd_gradient(p1, c, cfg)) < 1e-3 * sum_a);
        // The loss genuinely dips there.
        CHECK(gd_loss(p1, c, cfg) < gd_loss(p1 * 1.01, c, cfg));
        CHECK(gd_loss(p1, c, cfg) < gd_loss(p1 * 0.99, c, cfg));
    }
    SECTION("sampled-spectrum loss has its argmin at the true curvature") {
        const double p1 = params_from_position(SourcePosition::polar(20.0, deg_to_rad(30.0))).p1;
        const Eigen::MatrixXcd y = noiseless_quadratic(cfg, 20.0, 30.0, 1, 6);
        const AutocorrSpectrum c = autocorr_spectrum(y, xi);
        double best = 0.0, best_loss = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 4000; ++i) {
            const double cand = p1 * (0.7 + 0.6 * i / 4000.0);
            const double l = gd_loss(cand, c, cfg);
            if (l < best_loss) {
                best_loss = l;
                best = cand;
            }
        }
        CHECK(std::abs(best - p1) / std::abs(p1) < 2e-3);
    }
}

TEST_CASE("gd estimator") {
    const ArrayConfig cfg = paper_array();
    const int xi = default_xi(cfg.n_antennas);
    SECTION("noiseless warm-started run lands within 1%") {
        const double p1 = params_from_position(SourcePosition::polar(20.0, deg_to_rad(30.0))).p1;
        const Eigen::MatrixXcd y = noiseless_quadratic(cfg, 20.0, 30.0, 1, 13);
        const AutocorrSpectrum c = autocorr_spectrum(y, xi);
        const GdResult res = estimate_p1_gd(c, cfg);
        CHECK(std::abs(res.p1_hat - p1) / std::abs(p1) < 0.01);
        CHECK_FALSE(res.aborted);
    }
    SECTION("flat spectrum from cold start is a fixed point at zero") {
        GdConfig gd;
        gd.warm_start = WarmStart::none;
        const GdResult res = estimate_p1_gd(flat_spectrum(cfg, xi, 1.0), cfg, gd);
        CHECK(res.p1_hat == 0.0);
        CHECK(res.iterations == gd.n_itr);
        CHECK(res.final_loss == 0.0);
    }
    SECTION("best-iterate loss never exceeds the initialization loss") {
        RandomStream rng(21);
        for (int i = 0; i < 5; ++i) {
            const double r = rng.uniform(10.0, 60.0);
            const Eigen::MatrixXcd y = noiseless_quadratic(cfg, r, 10.0, 1, 300 + i);
            AutocorrSpectrum c = autocorr_spectrum(y, xi);
            // perturb the spectrum to keep the problem non-trivial
            for (auto& v : c.values) v = std::min(1.0, v + 0.01);
            GdConfig gd;
            gd.warm_start = WarmStart::none;
            gd.p1_init = -0.001;
            const GdResult res = estimate_p1_gd(c, cfg, gd);
            CHECK(res.final_loss <= gd_loss(gd.p1_init, c, cfg) + 1e-12);
        }
    }
    SECTION("non-finite gradient aborts with diagnostics") {
        AutocorrSpectrum c = flat_spectrum(cfg, xi, 0.5);
        c.values[3] = std::numeric_limits<double>::quiet_NaN();
        GdConfig gd;
        gd.warm_start = WarmStart::none;
        gd.gradient_mode = GradientMode::central_difference;
        const GdResult res = estimate_p1_gd(c, cfg, gd);
        CHECK(res.aborted);
    }
}

TEST_CASE("equivalent far-field transform") {
    const ArrayConfig cfg = paper_array();
    const double p1 = params_from_position(SourcePosition::polar(20.0, deg_to_rad(30.0))).p1;
    const Eigen::MatrixXcd y = noiseless_quadratic(cfg, 20.0, 30.0, 3, 19);
    SECTION("true curvature flattens the spectrum") {
        const Eigen::MatrixXcd yt = equivalent_farfield(y, p1, cfg);
        const AutocorrSpectrum c = autocorr_spectrum(yt, default_xi(cfg.n_antennas));
        for (int eta = 1; eta <= c.xi; ++eta) CHECK(c.at(eta) == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("zero curvature is the identity") {
        const Eigen::MatrixXcd yt = equivalent_farfield(y, 0.0, cfg);
        CHECK((yt - y).norm() == 0.0);
    }
    SECTION("transform preserves the modulus") {
        const Eigen::MatrixXcd yt = equivalent_farfield(y, -0.004, cfg);
        for (int n = 0; n < y.rows(); ++n)
            for (int t = 0; t < y.cols(); ++t)
                CHECK(std::abs(yt(n, t)) == Catch::Approx(std::abs(y(n, t))).epsilon(1e-14));
    }
    SECTION("the literal sign doubles the quadratic phase instead of cancelling it") {
        const Eigen::MatrixXcd yt = equivalent_farfield(y, p1, cfg, /*paper_literal_sign=*/true);
        const int xi = default_xi(cfg.n_antennas);
        const AutocorrSpectrum c = autocorr_spectrum(yt, xi);
        double worst = 0.0;
        for (int eta = 1; eta <= xi; ++eta)
            worst = std::max(worst, std::abs(c.at(eta) - model_autocorr(2.0 * p1, eta, cfg, xi)));
        CHECK(worst < 0.02);
    }
}

TEST_CASE("end-to-end noiseless estimation") {
    const ArrayConfig cfg = paper_array();
    const SourcePosition pos = SourcePosition::polar(20.0, deg_to_rad(30.0));
    const Eigen::MatrixXcd y =
        synthesize_received(cfg, pos, 4, kInf, 5, ChannelModel::quadratic).samples;
    const Eigen::VectorXcd h = channel_quadratic(cfg, params_from_position(pos));

    const Estimate gd = jac_estimate(y, cfg, CoaMethod::gd);
    const Estimate isf = jac_estimate(y, cfg, CoaMethod::isf);

    SECTION("gd meets the noiseless tolerances") {
        CHECK(nmse_of(h, gd.h_hat) < 1e-3);
        CHECK(std::abs(rad_to_deg(gd.theta_rad) - 30.0) < 0.2);
        REQUIRE(gd.r_m.has_value());
        CHECK(std::abs(*gd.r_m - 20.0) / 20.0 < 0.05);
    }
    SECTION("isf meets its looser tolerance and gd is at least as good") {
        CHECK(nmse_of(h, isf.h_hat) < 1e-2);
        CHECK(nmse_of(h, gd.h_hat) <= nmse_of(h, isf.h_hat) + 1e-12);
    }
    SECTION("reconstruction invariants") {
        for (const Estimate* e : {&gd, &isf}) {
            for (int n = 0; n < cfg.n_antennas; ++n)
                CHECK(std::abs(e->h_hat[n]) == Catch::Approx(1.0).epsilon(1e-14));
            const Eigen::VectorXcd want = reconstruct_channel(cfg, e->p1_hat, e->p2_hat);
            CHECK((e->h_hat - want).norm() == 0.0);
        }
    }
}

TEST_CASE("far-field source degenerates cleanly") {
    const ArrayConfig cfg = paper_array();
    const SourcePosition pos = SourcePosition::polar(400.0, deg_to_rad(14.0));
    const Eigen::MatrixXcd y =
        synthesize_received(cfg, pos, 4, kInf, 23, ChannelModel::quadratic).samples;
    const Estimate est = jac_estimate(y, cfg, CoaMethod::gd);
    CHECK(std::abs(est.p1_hat) < 2e-3);
    CHECK(std::abs(est.p2_hat - std::sin(pos.theta_rad)) < 2.0 / 4096.0);
}

TEST_CASE("estimated curvature decouples from the direction") {
    const ArrayConfig cfg = paper_array();
    const double p1 = -0.015;
    double ref_isf = 0.0, ref_gd = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double p2 = -0.6 + 0.4 * i;
        Eigen::MatrixXcd y(cfg.n_antennas, 1);
        y.col(0) = channel_quadratic(cfg, {p1, p2});
        const Estimate isf = jac_estimate(y, cfg, CoaMethod::isf);
        const Estimate gd = jac_estimate(y, cfg, CoaMethod::gd);
        if (i == 0) {
            ref_isf = isf.p1_hat;
            ref_gd = gd.p1_hat;
        } else {
            CHECK(isf.p1_hat == Catch::Approx(ref_isf).margin(1e-9));
            CHECK(gd.p1_hat == Catch::Approx(ref_gd).margin(1e-9));
        }
    }
}

TEST_CASE("exact unit-modulus rotations leave the estimate bit-identical") {
    // Multiplication by -1 or by j is exact in floating point, so the whole
    // pipeline must reproduce identical bits.
    const ArrayConfig cfg = paper_array(64);
    const SourcePosition pos = SourcePosition::polar(15.0, deg_to_rad(-20.0));
    const Eigen::MatrixXcd y = synthesize_received(cfg, pos, 4, 10.0, 31).samples;
    const Estimate base = jac_estimate(y, cfg, CoaMethod::gd);
    for (const std::complex<double> c :
         {std::complex<double>(-1.0, 0.0), std::complex<double>(0.0, 1.0)}) {
        const Estimate rot = jac_estimate((c * y).eval(), cfg, CoaMethod::gd);
        CHECK(rot.p1_hat == base.p1_hat);
        CHECK(rot.p2_hat == base.p2_hat);
        CHECK(rot.theta_rad == base.theta_rad);
        REQUIRE(rot.r_m.has_value() == base.r_m.has_value());
        if (base.r_m) CHECK(*rot.r_m == *base.r_m);
    }
}

TEST_CASE("spectrum normalization modes") {
    const ArrayConfig cfg = paper_array();
    const int xi = default_xi(cfg.n_antennas);
    const SourcePosition pos = SourcePosition::polar(25.0, 0.0);
    SECTION("noiseless input is left essentially unscaled by every mode") {
        const Eigen::MatrixXcd y =
            synthesize_received(cfg, pos, 2, kInf, 3, ChannelModel::quadratic).samples;
        const AutocorrSpectrum raw = autocorr_spectrum(y, xi);
        for (PowerNorm mode : {PowerNorm::signal_power, PowerNorm::lag0, PowerNorm::none}) {
            const AutocorrSpectrum c = normalize_spectrum(raw, y, mode, cfg);
            for (int eta = 1; eta <= xi; ++eta)
                CHECK(c.at(eta) == Catch::Approx(raw.at(eta)).epsilon(1e-4));
        }
    }
    SECTION("scaling the input does not move the normalized spectrum") {
        const Eigen::MatrixXcd y = synthesize_received(cfg, pos, 4, 10.0, 3).samples;
        const Eigen::MatrixXcd y2 = 3.0 * y;
        for (PowerNorm mode : {PowerNorm::signal_power, PowerNorm::lag0}) {
            const AutocorrSpectrum a =
                normalize_spectrum(autocorr_spectrum(y, xi), y, mode, cfg);
            const AutocorrSpectrum b =
                normalize_spectrum(autocorr_spectrum(y2, xi), y2, mode, cfg);
            for (int eta = 1; eta <= xi; ++eta)
                CHECK(a.at(eta) == Catch::Approx(b.at(eta)).epsilon(1e-9));
        }
    }
    SECTION("lag0 normalization absorbs the noise power, signal_power does not") {
        const Eigen::MatrixXcd y = synthesize_received(cfg, pos, 32, 5.0, 3).samples;
        const AutocorrSpectrum raw = autocorr_spectrum(y, xi);
        const AutocorrSpectrum lag0 = normalize_spectrum(raw, y, PowerNorm::lag0, cfg);
        const AutocorrSpectrum sig = normalize_spectrum(raw, y, PowerNorm::signal_power, cfg);
        // sigma2 = 10^(-0.5): the lag-0 window power sits near 1 + sigma2.
        CHECK(lag0.at(1) < sig.at(1) * 0.85);
        CHECK(sig.at(1) == Catch::Approx(1.0).epsilon(0.05));
    }
}
