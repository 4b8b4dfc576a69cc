#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ghostsnr/model.hpp"

using namespace ghostsnr;

namespace {

SourceParams source(SourceKind kind = SourceKind::Thermal) {
    SourceParams s;
    s.photon_flux = 1e12;
    s.coherence_time = 1e-9;
    s.coherence_radius = 1e-6;
    s.beam_radius = 1e-4;
    s.wave_number = 1e7;
    s.kind = kind;
    return s;
}

}  // namespace

TEST(Brightness, Definition) {
    EXPECT_NEAR(brightness(source()).value, 0.1, 1e-15);
    auto s = source();
    s.photon_flux *= 2;
    EXPECT_NEAR(brightness(s).value, 0.2, 1e-15);
}

TEST(Brightness, CoherenceRadiusMustBeSmall) {
    auto s = source();
    s.coherence_radius = s.beam_radius;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Regime, Classification) {
    auto s = source();
    s.coherence_radius = 1e-4;
    s.beam_radius = 1e-2;
    DetectorParams d;
    d.omega_B = 10.0 / s.coherence_time;
    GeometryParams g{1.0, FieldRegime::NearField};
    const auto r = classify_regime(s, g, d);
    EXPECT_NEAR(r.fresnel_cross, 5.0, 1e-12);
    EXPECT_EQ(r.thermal_field, FieldRegime::Intermediate);
    EXPECT_EQ(r.band, BandRegime::Narrowband);

    auto s2 = source(SourceKind::ClassicalPhaseSensitive);
    GeometryParams far{10.0, FieldRegime::FarField};
    const auto r2 = classify_regime(s2, far, d);
    EXPECT_NEAR(r2.fresnel_beam, 5e-3, 1e-15);
    EXPECT_EQ(r2.phase_sensitive_field, FieldRegime::FarField);
    EXPECT_EQ(classify_band(0.1), BandRegime::Broadband);
    EXPECT_EQ(classify_band(1.0), BandRegime::Intermediate);
}

TEST(Kernel, FarFieldSubstitution) {
    const auto ff = far_field_radii(source(), 10.0);
    EXPECT_NEAR(ff.beam_radius, 2.0, 1e-12);
    EXPECT_NEAR(ff.coherence_radius, 0.02, 1e-14);
    EXPECT_NEAR(ff.coherence_radius / ff.beam_radius, 0.01, 1e-14);

    GeometryParams far{10.0, FieldRegime::FarField};
    auto far_src = source();
    far_src.beam_radius = ff.beam_radius;
    far_src.coherence_radius = ff.coherence_radius;
    EXPECT_NEAR(brightness(far_src).value, brightness(source()).value, 1e-15);

    const auto k = make_kernel(KernelKind::PhaseInsensitiveAuto, source(), far);
    const auto kd = to_detection_plane(k, far);
    const double peak = 2.0 * 1e12 / (std::numbers::pi * ff.beam_radius * ff.beam_radius);
    EXPECT_NEAR(std::abs(eval_kernel(kd, {}, 0.0, {}, 0.0)) / peak, 1.0, 1e-12);
}

TEST(Kernel, NearFieldIsIdentity) {
    GeometryParams near{0.01, FieldRegime::NearField};
    const auto k = make_kernel(KernelKind::PhaseInsensitiveAuto, source(), near);
    const auto kd = to_detection_plane(k, near);
    const auto kdd = to_detection_plane(kd, near);
    for (double x : {0.0, 3e-7, 2e-6}) {
        const Vec2 a{x, 0.0}, b{0.0, -x};
        EXPECT_EQ(eval_kernel(k, a, 0.0, b, 1e-10), eval_kernel(kd, a, 0.0, b, 1e-10));
        EXPECT_EQ(eval_kernel(kd, a, 0.0, b, 1e-10), eval_kernel(kdd, a, 0.0, b, 1e-10));
    }
    GeometryParams mid{1.0, FieldRegime::Intermediate};
    EXPECT_THROW(to_detection_plane(k, mid), UnsupportedRegime);
}

TEST(Kernel, PeakAndThermalCross) {
    const auto s = source();
    const auto a = make_kernel(KernelKind::PhaseInsensitiveAuto, s);
    const auto c = make_kernel(KernelKind::PhaseInsensitiveCross, s);
    const double peak = 2.0 * s.photon_flux / (std::numbers::pi * s.beam_radius * s.beam_radius);
    EXPECT_NEAR(eval_kernel(a, {}, 0.0, {}, 0.0).real(), peak, peak * 1e-14);
    for (double x : {0.0, 1e-6, 5e-5})
        for (double t : {0.0, 1e-9}) {
            const Vec2 r1{x, 0.0}, r2{0.0, 2e-6};
            EXPECT_EQ(eval_kernel(a, r1, 0.0, r2, t), eval_kernel(c, r1, 0.0, r2, t));
            EXPECT_LE(std::abs(eval_kernel(a, r1, 0.0, r2, t)), std::abs(eval_kernel(a, r1, 0.0, r1, 0.0)) * (1 + 1e-12) +
                                                                    std::abs(eval_kernel(a, r2, 0.0, r2, 0.0)));
        }
}

TEST(Kernel, MaximumAtCoincidence) {
    const auto s = source(SourceKind::QuantumPhaseSensitive);
    for (auto kind : {KernelKind::PhaseInsensitiveAuto, KernelKind::PhaseSensitiveCrossQuantum}) {
        const auto k = make_kernel(kind, s);
        const double at = std::abs(eval_kernel(k, {}, 0.0, {}, 0.0));
        for (double dx : {1e-7, 5e-7, 2e-6})
            for (double dt : {0.0, 2e-10, 1e-9}) EXPECT_LT(std::abs(eval_kernel(k, {}, 0.0, {dx, 0.0}, dt)), at);
    }
}

TEST(Kernel, QuantumTermRatio) {
    auto s = source(SourceKind::QuantumPhaseSensitive);
    s.photon_flux = 1e9;  // I = 1e-4
    ASSERT_NEAR(brightness(s).value, 1e-4, 1e-18);
    const auto k = make_kernel(KernelKind::PhaseSensitiveCrossQuantum, s);
    ASSERT_EQ(k.terms.size(), 2u);
    const double ratio = std::abs(k.terms[1].amplitude) / std::abs(k.terms[0].amplitude);
    EXPECT_NEAR(ratio, std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(1e-4), 1e-9);
    EXPECT_NEAR(ratio, 89.3, 0.05);
    EXPECT_NEAR(k.terms[1].coherence_radius, s.coherence_radius / std::sqrt(2.0), 1e-18);
    EXPECT_NEAR(k.terms[1].coherence_time, s.coherence_time / std::sqrt(2.0), 1e-21);
}

TEST(Kernel, ClassicalityBound) {
    for (auto kind : {SourceKind::Thermal, SourceKind::ClassicalPhaseSensitive}) {
        const auto s = source(kind);
        const auto a = make_kernel(KernelKind::PhaseInsensitiveAuto, s);
        const auto c = make_kernel(kind == SourceKind::Thermal ? KernelKind::PhaseInsensitiveCross
                                                               : KernelKind::PhaseSensitiveCrossClassical,
                                   s);
        for (double x1 : {0.0, 3e-6, 4e-5})
            for (double x2 : {0.0, -1e-6, 2e-5})
                for (double t : {0.0, 5e-10}) {
                    const Vec2 r1{x1, 0.0}, r2{x2, 1e-6};
                    const double lhs = std::norm(eval_kernel(c, r1, 0.0, r2, t));
                    const double rhs =
                        eval_kernel(a, r1, 0.0, r1, 0.0).real() * eval_kernel(a, r2, t, r2, t).real();
                    EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
                }
    }
    auto q = source(SourceKind::QuantumPhaseSensitive);
    q.photon_flux = 4e11;  // I = 0.04
    const auto a = make_kernel(KernelKind::PhaseInsensitiveAuto, q);
    const auto c = make_kernel(KernelKind::PhaseSensitiveCrossQuantum, q);
    const double lhs = std::norm(eval_kernel(c, {}, 0.0, {}, 0.0));
    const double rhs = std::pow(eval_kernel(a, {}, 0.0, {}, 0.0).real(), 2);
    EXPECT_GT(lhs / rhs, 1.0);
}

TEST(Kernel, StateWithoutCorrelationIsRejected) {
    EXPECT_THROW(make_kernel(KernelKind::PhaseSensitiveCrossClassical, source(SourceKind::Thermal)), UnsupportedState);
    EXPECT_THROW(make_kernel(KernelKind::PhaseInsensitiveCross, source(SourceKind::QuantumPhaseSensitive)),
                 UnsupportedState);
}

TEST(Mask, Areas) {
    const auto g = MaskSpec::gaussian_spot(2.0);
    EXPECT_NEAR(g.effective_area(), std::numbers::pi, 1e-12);
    EXPECT_NEAR(g.power_area(), 2.0 * std::numbers::pi, 1e-12);
    const auto d = MaskSpec::disk(1.0, {0.5, 0.0});
    EXPECT_NEAR(d.effective_area(), std::numbers::pi, 1e-12);
    EXPECT_EQ(d.transmissivity_at({-0.6, 0.0}), 0.0);
    EXPECT_EQ(d.transmissivity_at({1.4, 0.0}), 1.0);
    EXPECT_FALSE(MaskSpec::uniform(1.0).has_finite_area());
}
