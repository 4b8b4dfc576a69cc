#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ghostsnr/mc.hpp"
#include "ghostsnr/wick.hpp"

using namespace ghostsnr;
using namespace ghostsnr::mc;

namespace {

constexpr double pi = std::numbers::pi;

PlaneModel desk(SourceKind kind, double I, double x) {
    PlaneModel m;
    m.kind = kind;
    m.brightness = I;
    m.bandwidth_product = x;
    m.pinhole_area = 0.1;
    m.eta = 0.9;
    const double w = std::sqrt(4.0 * 25.0 / pi);
    m.mask = MaskSpec::gaussian_spot(w);
    m.envelope_radius = 3.0 * w;
    return m;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

}  // namespace

TEST(Grid, Resolution) {
    const auto g = make_grid(desk(SourceKind::Thermal, 1.0, 10.0), 1000.0, 1);
    EXPECT_LE(g.dt, 1.0 / 20 + 1e-15);
    EXPECT_LE(g.dt, 0.2 / 10.0 + 1e-15);
    EXPECT_LE(g.spatial_step, 0.25);
    EXPECT_EQ(g.points % g.coarse_points, 0);
    EXPECT_NEAR(g.duration, 1000.0, 1e-12);
}

TEST(Detect, ZeroFluxGivesZeroCurrent) {
    const auto g = make_grid(desk(SourceKind::Thermal, 1.0, 10.0), 200.0, 1);
    const auto i = detect(std::vector<double>(g.coarse_points, 0.0), g, 1, 0);
    for (double v : i) EXPECT_EQ(v, 0.0);
}

TEST(Detect, FilterKillsDc) {
    const auto g = make_grid(desk(SourceKind::Thermal, 1.0, 10.0), 200.0, 1);
    const auto out = apply_filter(std::vector<double>(g.points, 3.7), g, 10.0, 0.0);
    double m = 0.0;
    for (double v : out) m += v;
    EXPECT_NEAR(m / g.points, 0.0, 1e-12);
    EXPECT_EQ(filter_response(g, 10.0, 0.0)[0], 0.0);
}

TEST(Detect, FilteredShotNoisePower) {
    const double x = 10.0, lambda = 50.0;
    const auto g = make_grid(desk(SourceKind::Thermal, 1.0, x), 200.0, 1);
    // (1/2pi) int |H_B|^2 dw with H_B = exp(-2 w^2/x^2)
    const double expect = lambda * x / (4.0 * std::sqrt(pi));
    double acc = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto i = detect(std::vector<double>(g.coarse_points, lambda), g, 7, t);
        const auto f = apply_filter(i, g, x, 0.0);
        double p = 0.0;
        for (double v : f) p += v * v;
        acc += p / g.points;
    }
    EXPECT_NEAR(acc / 100 / expect, 1.0, 0.03);
}

TEST(Simulator, RejectsQuantum) {
    try {
        Simulator s(desk(SourceKind::QuantumPhaseSensitive, 1.0, 10.0), 1000.0, 1);
        FAIL() << "expected UnsupportedState";
    } catch (const UnsupportedState& e) {
        EXPECT_NE(std::string(e.what()).find("no proper P representation"), std::string::npos);
    }
}

TEST(Simulator, FieldMoments) {
    McOptions opt;
    opt.probes = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.2, 0.4}};
    for (auto kind : {SourceKind::Thermal, SourceKind::ClassicalPhaseSensitive}) {
        const auto m = desk(kind, 1.0, 10.0);
        const Simulator sim(m, 100.0, 11, opt);
        const auto terms = plane_terms(m, KernelKind::PhaseInsensitiveAuto);
        const int n = 200;
        std::vector<std::complex<double>> pi_cross(opt.probes.size()), ps_cross(opt.probes.size());
        std::vector<double> pi_re(opt.probes.size()), ps_abs2(opt.probes.size());
        double flux = 0.0;
        for (int t = 0; t < n; ++t) {
            const auto f = sim.synthesize_fields(t);
            flux += mean(f.pinhole_flux);
            const size_t N = f.pinhole.size();
            for (size_t p = 0; p < opt.probes.size(); ++p) {
                std::complex<double> a = 0.0, b = 0.0;
                for (size_t i = 0; i < N; ++i) {
                    a += std::conj(f.pinhole[i]) * f.probes[p][i];
                    b += f.pinhole[i] * f.probes[p][i];
                }
                a /= double(N);
                b /= double(N);
                pi_cross[p] += a;
                ps_cross[p] += b;
                // magnitude of whichever correlation the state should carry
                const double mag = kind == SourceKind::Thermal ? a.real() : b.real();
                pi_re[p] += mag;
                const auto zero = kind == SourceKind::Thermal ? b : a;
                ps_abs2[p] += std::norm(zero);
            }
        }
        const double k0 = eval_terms(terms, {}, 0.0, {}, 0.0).real();
        EXPECT_NEAR(flux / n / (m.eta * m.pinhole_area * k0), 1.0, 0.03);
        for (size_t p = 0; p < opt.probes.size(); ++p) {
            const double target = eval_terms(terms, {}, 0.0, opt.probes[p], 0.0).real();
            const double avg = pi_re[p] / n;
            EXPECT_NEAR(avg / target, 1.0, 0.05) << "probe " << p;
            // the absent correlation vanishes within 3 standard errors
            const auto z = (kind == SourceKind::Thermal ? ps_cross[p] : pi_cross[p]) / double(n);
            const double zsd = std::sqrt(ps_abs2[p] / n / n);
            EXPECT_LT(std::abs(z), 3.0 * zsd + 1e-12) << "probe " << p;
        }
    }
}

TEST(Simulator, FixedSeedReproducible) {
    const auto m = desk(SourceKind::Thermal, 10.0, 10.0);
    const Simulator a(m, 200.0, 42), b(m, 200.0, 42);
    for (std::uint64_t t : {0u, 5u, 17u}) {
        const auto ra = a.run_trial(t), rb = b.run_trial(t);
        EXPECT_EQ(ra.C_hat, rb.C_hat);
        EXPECT_EQ(ra.filtered_power_pinhole, rb.filtered_power_pinhole);
    }
    const Simulator c(m, 200.0, 43);
    EXPECT_NE(a.run_trial(0).C_hat, c.run_trial(0).C_hat);
    // trial streams do not depend on evaluation order
    const auto late = a.run_trial(9);
    const Simulator d(m, 200.0, 42);
    EXPECT_EQ(d.run_trial(9).C_hat, late.C_hat);
}

TEST(Simulator, NearFieldThermalEqualsClassicalPs) {
    const Simulator a(desk(SourceKind::Thermal, 1.0, 10.0), 200.0, 3);
    const Simulator b(desk(SourceKind::ClassicalPhaseSensitive, 1.0, 10.0), 200.0, 3);
    for (std::uint64_t t : {0u, 1u, 2u}) EXPECT_EQ(a.run_trial(t).C_hat, b.run_trial(t).C_hat);
}

TEST(Estimate, MeanMatchesOracle) {
    const auto m = desk(SourceKind::Thermal, 10.0, 10.0);
    const auto e = estimate_snr(m, 1000.0, 200, 5);
    const double oracle = wick::mean_C(m);
    EXPECT_LT(std::abs(e.mean_C - oracle), 3.0 * e.mean_stderr);
    EXPECT_GT(e.analytic_ref, 0.0);
    EXPECT_EQ(e.n_trials, 200);
    EXPECT_THROW(estimate_snr(m, 1000.0, 50, 5), ConfigError);
    EXPECT_THROW(estimate_snr(m, 50.0, 200, 5), ConfigError);
}

TEST(Estimate, SeedStability) {
    const auto m = desk(SourceKind::Thermal, 10.0, 10.0);
    const auto a = estimate_snr(m, 1000.0, 200, 1);
    const auto b = estimate_snr(m, 1000.0, 200, 2);
    EXPECT_LT(std::abs(a.snr_hat - b.snr_hat), 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(Jackknife, KnownSample) {
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) x.push_back(2.0 + std::cos(0.7 * i));
    const auto j = jackknife_snr(x);
    double m = 0.0, v = 0.0;
    for (double d : x) m += d;
    m /= x.size();
    for (double d : x) v += (d - m) * (d - m);
    v /= x.size() - 1;
    EXPECT_NEAR(j.value, m * m / v, 1e-12 * j.value);
    EXPECT_GT(j.std_error, 0.0);
}
