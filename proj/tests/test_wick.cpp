#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ghostsnr/analytic.hpp"
#include "ghostsnr/wick.hpp"

using namespace ghostsnr;
using namespace ghostsnr::wick;

namespace {

constexpr double pi = std::numbers::pi;

PlaneModel spot(SourceKind kind, double I, double x, double cells) {
    PlaneModel m;
    m.kind = kind;
    m.brightness = I;
    m.bandwidth_product = x;
    m.pinhole_area = 0.1;
    m.eta = 0.9;
    const double w = std::sqrt(4.0 * cells / pi);
    m.mask = MaskSpec::gaussian_spot(w);
    m.envelope_radius = 10.0 * w;
    return m;
}

const LedgerEntry* entry(const OracleResult& r, const std::string& cls) {
    for (const auto& e : r.term_ledger)
        if (e.term_class == cls) return &e;
    return nullptr;
}

}  // namespace

TEST(NormalOrder, FourthMomentLengths) {
    const auto ex = photocurrent_fourth_moment();
    ASSERT_EQ(ex.size(), 4u);
    EXPECT_EQ(ex[0].order(), 8);
    EXPECT_EQ(ex[1].order(), 6);
    EXPECT_EQ(ex[2].order(), 6);
    EXPECT_EQ(ex[3].order(), 4);
    for (const auto& e : ex) {
        bool seen_plain = false;
        for (const auto& l : e.labels) {
            if (!l.daggered) seen_plain = true;
            EXPECT_FALSE(l.daggered && seen_plain);
        }
    }
}

TEST(NormalOrder, DifferentDetectorsCommute) {
    const auto ex = normal_order({{1, 0}, {2, 0}});
    ASSERT_EQ(ex.size(), 1u);
    EXPECT_EQ(ex[0].order(), 4);
    EXPECT_TRUE(ex[0].commutator_deltas.empty());
}

TEST(NormalOrder, SingleCurrentSecondMoment) {
    const auto ex = normal_order({{1, 0}, {1, 1}});
    ASSERT_EQ(ex.size(), 2u);
    EXPECT_EQ(ex[0].order(), 4);
    EXPECT_EQ(ex[1].order(), 2);
    EXPECT_EQ(ex[1].commutator_deltas.size(), 1u);
}

TEST(Pairings, Counts) {
    const auto four = normal_order({{1, 0}, {2, 0}});
    EXPECT_EQ(enumerate_pairings(four[0], SourceKind::Thermal).size(), 2u);
    const auto ex = photocurrent_fourth_moment();
    EXPECT_EQ(enumerate_pairings(ex[0], SourceKind::Thermal).size(), 24u);
    for (auto k : {SourceKind::ClassicalPhaseSensitive, SourceKind::QuantumPhaseSensitive}) {
        const auto p = enumerate_pairings(ex[0], k);
        EXPECT_LE(p.size(), 105u);
        EXPECT_GT(p.size(), 0u);
        for (const auto& pr : p) EXPECT_EQ(pr.pairs.size(), 4u);
    }
}

TEST(Oracle, ThermalMeanClosedForm) {
    for (double x : {10.0, 0.1}) {
        auto m = spot(SourceKind::Thermal, 10.0, x, 25.0);
        const double w = m.mask.size(), e = m.envelope_radius;
        const double expect = m.eta * m.eta * m.pinhole_area * std::pow(2 * m.brightness / pi, 2) * pi /
                              (1 + 2 / (w * w) + 2 / (e * e)) / std::sqrt(1 + 16 / (x * x));
        EXPECT_NEAR(mean_C(m) / expect, 1.0, 1e-3);
    }
}

TEST(Oracle, ZeroMaskAndBackgroundKill) {
    auto m = spot(SourceKind::Thermal, 1.0, 10.0, 25.0);
    m.mask = MaskSpec::uniform(0.0);
    EXPECT_EQ(mean_C(m), 0.0);

    const auto r = variance_C(spot(SourceKind::Thermal, 1.0, 10.0, 25.0), 1000.0);
    const auto* bg = entry(r, "background");
    ASSERT_NE(bg, nullptr);
    EXPECT_EQ(bg->value, 0.0);
    EXPECT_GT(bg->killed_by_ac, 0);
}

TEST(Oracle, LedgerAndPositivity) {
    for (auto k : {SourceKind::Thermal, SourceKind::ClassicalPhaseSensitive, SourceKind::QuantumPhaseSensitive})
        for (double I : {1e-3, 10.0}) {
            const auto r = variance_C(spot(k, I, 0.1, 25.0), 1000.0);
            double sum = 0.0;
            for (const auto& e : r.term_ledger) {
                sum += e.value;
                EXPECT_LT(e.imag_residue, 1e-10);
            }
            EXPECT_GT(r.variance, 0.0);
            EXPECT_LE(std::abs(sum - r.variance), 1e-12 * r.variance);
            EXPECT_NEAR(r.snr, r.mean * r.mean / r.variance, 1e-12 * r.snr);
        }
}

TEST(Oracle, ChargeCancels) {
    SourceParams s;
    s.photon_flux = 1e14;
    s.coherence_time = 1e-9;
    s.coherence_radius = 1e-4;
    s.beam_radius = 1e-2;
    s.wave_number = 1e7;
    DetectorParams d;
    d.eta = 0.9;
    d.omega_B = 1e10;
    d.pinhole_area = 1e-9;
    const GeometryParams g{0.1, FieldRegime::NearField};
    const auto mask = MaskSpec::gaussian_spot(1e-3);
    const auto a = variance_C(s, d, g, mask, 1e-6);
    d.electron_charge *= 2;
    const auto b = variance_C(s, d, g, mask, 1e-6);
    EXPECT_NEAR(b.mean / a.mean, 4.0, 1e-12);
    EXPECT_NEAR(b.variance / a.variance, 16.0, 1e-11);
    EXPECT_NEAR(b.snr / a.snr, 1.0, 1e-12);
}

TEST(Oracle, NotchSensitivity) {
    const auto m = spot(SourceKind::Thermal, 10.0, 10.0, 25.0);
    const auto pts = notch_sensitivity(m, 1000.0, {0.0, 0.01, 0.1});
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_LT(std::abs(pts[1].relative_change), 0.01);
    EXPECT_LT(std::abs(pts[2].relative_change), 0.05);
    auto bad = m;
    bad.notch_product = bad.bandwidth_product;
    EXPECT_THROW(variance_C(bad, 1000.0), ConfigError);
}

TEST(Oracle, QuantumClassicalLimit) {
    const auto q = variance_C(spot(SourceKind::QuantumPhaseSensitive, 1e6, 10.0, 25.0), 1000.0);
    const auto t = variance_C(spot(SourceKind::Thermal, 1e6, 10.0, 25.0), 1000.0);
    EXPECT_NEAR(q.snr / t.snr, 1.0, 0.02);
}

TEST(Oracle, Guards) {
    auto m = spot(SourceKind::Thermal, 1.0, 10.0, 25.0);
    EXPECT_THROW(variance_C(m, 50.0), ConfigError);
    m.pinhole_area = 1.0;
    EXPECT_THROW(variance_C(m, 1000.0), ConfigError);
}

TEST(Oracle, DiskMaskMatchesSpotScale) {
    auto m = spot(SourceKind::Thermal, 10.0, 10.0, 25.0);
    m.mask = MaskSpec::disk(std::sqrt(25.0 / pi));
    const auto r = variance_C(m, 1000.0);
    EXPECT_GT(r.snr, 0.0);
    EXPECT_LT(r.quadrature_error_estimate, 1e-4 * r.variance);
}

// Closed-form example at the figure parameter set: thermal narrowband, I = 100.
TEST(OracleVsClosedForm, ThermalNarrowbandFigurePoint) {
    const auto m = spot(SourceKind::Thermal, 100.0, 10.0, 1e4);
    const auto r = variance_C(m, 1000.0);
    const auto a = evaluate(Formula::ThermalNarrowband, NormalizedParams{100.0, 10.0, 10.0, 1e4, 0.9, 1.0, 1000.0});
    EXPECT_NEAR(r.snr / a.snr, 1.0, 0.10);
}
