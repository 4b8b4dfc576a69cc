#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ghostsnr/analytic.hpp"

using namespace ghostsnr;

namespace {

constexpr double pi = std::numbers::pi;

NormalizedParams fig(double I, double x) {
    return NormalizedParams{I, x, 10.0, 1e4, 0.9, 1.0, 1.0};
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST(ThermalNarrowband, Examples) {
    const auto r = evaluate(Formula::ThermalNarrowband, fig(100, 10));
    EXPECT_NEAR(r.snr, 2.506e-4, 5e-8);
    double denom = 0.0;
    for (const auto& t : r.noise_terms) denom += t.value;
    EXPECT_NEAR(denom, 3989.9, 0.1);
    EXPECT_EQ(r.dominant_term, "excess");
    EXPECT_NEAR(r.noise_terms.front().value, 1e4 / std::sqrt(2 * pi), 1e-9);

    const auto lo = evaluate(Formula::ThermalNarrowband, fig(1e-4, 10));
    EXPECT_NEAR(lo.snr, 1.034e-9, 1e-12);
    EXPECT_LT(rel(lo.snr, lo.asymptotes.low_brightness), 0.01);

    auto p = fig(100, 10);
    p.transmission = 0.0;
    EXPECT_EQ(evaluate(Formula::ThermalNarrowband, p).snr, 0.0);
}

TEST(ThermalBroadband, Examples) {
    const auto hi = evaluate(Formula::ThermalBroadband, fig(1e8, 0.1));
    EXPECT_NEAR(hi.asymptotes_normalized.high_brightness, 6.267e-6, 1e-9);
    EXPECT_NEAR(hi.asymptotes_normalized.high_brightness, std::sqrt(pi) / (2 * std::sqrt(2.0)) * 0.1 * 1e-4, 1e-18);

    const auto lo = evaluate(Formula::ThermalBroadband, fig(1e-2, 0.1));
    EXPECT_NEAR(lo.asymptotes_normalized.low_brightness, 4 / std::sqrt(pi) * 0.1 * 0.81 * 1e-4, 1e-15);
    EXPECT_NEAR(lo.asymptotes_normalized.low_brightness, 1.828e-5, 1e-8);

    auto p = fig(1.0, 0.1);
    p.eta = 0.0;
    EXPECT_THROW(evaluate(Formula::ThermalBroadband, p), ConfigError);
}

TEST(QuantumNarrowbandNear, Examples) {
    const auto r = evaluate(Formula::QuantumNarrowbandNear, fig(1e-3, 10));
    EXPECT_NEAR(r.snr, 4.13e-5, 0.01e-5);
    EXPECT_NEAR(r.asymptotes.low_brightness, 4.125e-5, 0.001e-5);
    EXPECT_LT(rel(r.snr, r.asymptotes.low_brightness), 0.01);
    const auto hi = evaluate(Formula::QuantumNarrowbandNear, fig(1e6, 10));
    EXPECT_LT(rel(hi.snr, 2.5066e-4), 0.01);
    auto p = fig(1e-3, 10);
    p.transmission = 0.0;
    EXPECT_EQ(evaluate(Formula::QuantumNarrowbandNear, p).snr, 0.0);
}

TEST(QuantumBroadbandNear, HumpAndLimits) {
    const auto opt = optimal_brightness(Formula::QuantumBroadbandNear, fig(1.0, 1e-2));
    EXPECT_FALSE(opt.monotone);
    EXPECT_GT(opt.I_opt, 1e-2 / 3);
    EXPECT_LT(opt.I_opt, 1e-2 * 3);
    const auto poly = brightness_polynomial(Formula::QuantumBroadbandNear, fig(1.0, 1e-2));
    const double h = 1e-4 * opt.I_opt;
    const double slope = (poly(opt.I_opt + h) - poly(opt.I_opt - h)) / (2 * h);
    EXPECT_LT(std::abs(slope) * opt.I_opt / poly(opt.I_opt), 1e-3);
    const double cell = std::pow(1e16, 1.0 / 399);
    EXPECT_LE(std::max(opt.grid_I_opt / opt.I_opt, opt.I_opt / opt.grid_I_opt), cell * (1 + 1e-9));

    const auto q = evaluate(Formula::QuantumBroadbandNear, fig(1e9, 1e-2));
    const auto t = evaluate(Formula::ThermalBroadband, fig(1e9, 1e-2));
    EXPECT_LT(rel(q.asymptotes.high_brightness, t.asymptotes.high_brightness), 1e-12);
    EXPECT_LT(rel(q.snr, t.asymptotes.high_brightness), 1e-3);

    const auto lo = evaluate(Formula::QuantumBroadbandNear, fig(1e-4, 1e-2));
    auto lowflux = fig(1e-9, 1e-2);
    const auto lf = evaluate(Formula::QuantumBroadbandNear, lowflux);
    EXPECT_LT(rel(lf.snr, lf.asymptotes.low_brightness), 0.05);
    EXPECT_GT(lo.snr, 0.0);
}

TEST(QuantumFar, Examples) {
    const auto nb = evaluate(Formula::QuantumNarrowbandFar, fig(1e9, 10));
    EXPECT_LT(rel(nb.snr, std::sqrt(2 * pi) * 1e-4), 1e-3);
    const auto poly = brightness_polynomial(Formula::QuantumNarrowbandFar, fig(1.0, 10));
    const double I = 1 / std::sqrt(8 * pi);
    EXPECT_NEAR(std::pow(1 + poly.k / I, 2), 4.0, 1e-12);

    const auto near = evaluate(Formula::QuantumNarrowbandNear, fig(1e-6, 10));
    const auto far = evaluate(Formula::QuantumNarrowbandFar, fig(1e-6, 10));
    EXPECT_NEAR(far.asymptotes.low_brightness / near.asymptotes.low_brightness, 0.5, 1e-12);

    const auto bnear = evaluate(Formula::QuantumBroadbandNear, fig(1e-6, 0.1));
    const auto bfar = evaluate(Formula::QuantumBroadbandFar, fig(1e-6, 0.1));
    EXPECT_NEAR(bfar.asymptotes.low_brightness / bnear.asymptotes.low_brightness, 0.5, 1e-12);
    const auto bb = evaluate(Formula::QuantumBroadbandFar, fig(1e9, 0.1));
    EXPECT_LT(rel(bb.snr, std::sqrt(pi / 8) * 0.1 * 1e-4), 1e-3);

    auto p = fig(1.0, 0.1);
    p.eta = 1.0;
    const auto one = evaluate(Formula::QuantumBroadbandFar, p);
    for (const auto& t : one.noise_terms) {
        EXPECT_TRUE(std::isfinite(t.value));
        EXPECT_GT(t.value, 0.0);
    }
}

TEST(Properties, DecompositionAndSaturation) {
    for (auto f : {Formula::ThermalNarrowband, Formula::ThermalBroadband, Formula::QuantumNarrowbandNear,
                   Formula::QuantumBroadbandNear, Formula::QuantumNarrowbandFar, Formula::QuantumBroadbandFar}) {
        for (double I : {1e-6, 1e-2, 1.0, 1e3}) {
            const auto r = evaluate(f, fig(I, 0.1));
            double s = 0.0;
            for (const auto& t : r.noise_terms) s += t.value;
            EXPECT_LT(rel(r.numerator / s, r.snr_normalized), 1e-12);
        }
    }
    for (auto f : {Formula::ThermalNarrowband, Formula::ThermalBroadband}) {
        const double x = f == Formula::ThermalNarrowband ? 10.0 : 0.1;
        double prev = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double I = std::pow(10.0, -6.0 + 12.0 * i / 199);
            const auto r = evaluate(f, fig(I, x));
            EXPECT_GE(r.snr, prev);
            EXPECT_LE(r.snr, r.asymptotes.high_brightness);
            prev = r.snr;
        }
        const auto top = evaluate(f, fig(1e6, x));
        EXPECT_LT(rel(top.snr, top.asymptotes.high_brightness), 1e-3);
    }
}

TEST(Properties, LowFluxLinearity) {
    // eta P A'_T/(Omega_B a0^2) = eta I n / (Omega_B T0) <= 1e-3
    for (auto f : {Formula::QuantumNarrowbandNear, Formula::QuantumBroadbandNear}) {
        const double x = f == Formula::QuantumNarrowbandNear ? 10.0 : 0.1;
        const double I1 = 1e-3 * x / (0.9 * 1e4) / 10, I0 = I1 / 10;
        const double slope = std::log10(evaluate(f, fig(I1, x)).snr / evaluate(f, fig(I0, x)).snr);
        EXPECT_NEAR(slope, 1.0, 0.02);
    }
}

namespace {

SnrQuery far_query(SourceKind kind) {
    SnrQuery q;
    q.src.photon_flux = 1e13;
    q.src.coherence_time = 1e-9;
    q.src.coherence_radius = 1e-6;
    q.src.beam_radius = 1e-4;
    q.src.wave_number = 1e7;
    q.src.kind = kind;
    q.geo = {10.0, FieldRegime::FarField};  // a_L = 2 m, rho_L = 0.02 m
    q.det.eta = 0.9;
    q.det.omega_B = 1e10;
    q.det.pinhole_area = 4e-5;
    q.det.pinhole_pos = {0.05, 0.0};
    q.mask = MaskSpec::disk(1.0, {0.1, 0.0});
    q.averaging_time = 1e-6;
    return q;
}

}  // namespace

TEST(Properties, FarFieldSubstitution) {
    const auto far = far_query(SourceKind::Thermal);
    auto near = far;
    near.src.beam_radius = 2.0;
    near.src.coherence_radius = 0.02;
    near.geo = {1.0, FieldRegime::NearField};
    const auto a = snr(far), b = snr(near);
    EXPECT_LT(rel(a.snr, b.snr), 1e-12);
    EXPECT_GT(a.snr, 0.0);

    // Phase-sensitive far field reads the mask at -rho1: outside the offset disk here.
    auto ps = far_query(SourceKind::ClassicalPhaseSensitive);
    ps.mask = MaskSpec::disk(0.5, {0.6, 0.0});
    ps.det.pinhole_pos = {0.2, 0.0};
    EXPECT_EQ(snr(ps).snr, 0.0);
    auto th = ps;
    th.src.kind = SourceKind::Thermal;
    EXPECT_GT(snr(th).snr, 0.0);

    auto sym_ps = far_query(SourceKind::ClassicalPhaseSensitive);
    sym_ps.mask = MaskSpec::disk(1.0);
    auto sym_th = sym_ps;
    sym_th.src.kind = SourceKind::Thermal;
    EXPECT_EQ(snr(sym_ps).snr, snr(sym_th).snr);
}

TEST(Properties, ThermalClassicalNearEquality) {
    auto q = far_query(SourceKind::Thermal);
    q.geo = {1e-4, FieldRegime::NearField};
    q.src.beam_radius = 1e-2;
    q.src.coherence_radius = 1e-4;
    q.det.pinhole_area = 1e-9;
    q.det.pinhole_pos = {};
    q.mask = MaskSpec::gaussian_spot(1e-2);
    for (double omega : {1e10, 1e8}) {
        q.det.omega_B = omega;
        auto c = q;
        c.src.kind = SourceKind::ClassicalPhaseSensitive;
        const auto a = snr(q), b = snr(c);
        EXPECT_EQ(a.snr, b.snr);
        EXPECT_EQ(a.snr_normalized, b.snr_normalized);
        ASSERT_EQ(a.noise_terms.size(), b.noise_terms.size());
        for (size_t i = 0; i < a.noise_terms.size(); ++i) EXPECT_EQ(a.noise_terms[i].value, b.noise_terms[i].value);
    }
}

TEST(Guards, WarningsAreNotFatal) {
    auto p = fig(1.0, 10);
    p.cells = 25;
    const auto r = evaluate(Formula::ThermalNarrowband, p);
    bool found = false;
    for (const auto& w : r.warnings) found |= w.code == "cells";
    EXPECT_TRUE(found);
    EXPECT_GT(r.snr, 0.0);
    const auto mid = evaluate(Formula::ThermalNarrowband, fig(1.0, 1.0));
    found = false;
    for (const auto& w : mid.warnings) found |= w.code == "band";
    EXPECT_TRUE(found);
    EXPECT_THROW(select_formula(SourceKind::Thermal, FieldRegime::Intermediate, BandRegime::Narrowband),
                 UnsupportedRegime);
}
