#include "ghostsnr/mc.hpp"

#include <fftw3.h>

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "ghostsnr/analytic.hpp"

namespace ghostsnr::mc {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int good_size(int n) {
    for (int m = std::max(n, 2);; ++m) {
        if (m % 2) continue;
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

template <class T>
struct FftwBuffer {
    T* p = nullptr;
    explicit FftwBuffer(size_t n) : p(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<size_t>(n, 1)))) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    T& operator[](size_t i) { return p[i]; }
};

using Complex = fftw_complex;

}  // namespace

struct Simulator::Plans {
    int nc = 0;
    int n = 0;
    fftw_plan field = nullptr;     // complex backward, coarse
    fftw_plan coarse_r2c = nullptr;
    fftw_plan fine_c2r = nullptr;
    fftw_plan fine_r2c = nullptr;

    Plans(int coarse, int fine) : nc(coarse), n(fine) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        FftwBuffer<Complex> c1(nc), c2(nc), f1(n / 2 + 1);
        FftwBuffer<double> r1(nc), r2(n);
        field = fftw_plan_dft_1d(nc, c1.p, c2.p, FFTW_BACKWARD, FFTW_ESTIMATE);
        coarse_r2c = fftw_plan_dft_r2c_1d(nc, r1.p, c1.p, FFTW_ESTIMATE);
        fine_c2r = fftw_plan_dft_c2r_1d(n, f1.p, r2.p, FFTW_ESTIMATE);
        fine_r2c = fftw_plan_dft_r2c_1d(n, r2.p, f1.p, FFTW_ESTIMATE);
    }
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (auto p : {field, coarse_r2c, fine_c2r, fine_r2c})
            if (p) fftw_destroy_plan(p);
    }
};

namespace {

// Band-limited upsampling of a real coarse series followed by Gaussian shot noise.
std::vector<double> upsample_with_noise(Simulator::Plans& plans, const std::vector<double>& coarse, double dt,
                                        std::mt19937_64& rng) {
    const int nc = plans.nc, n = plans.n;
    FftwBuffer<double> rc(nc), rf(n);
    FftwBuffer<Complex> sc(nc / 2 + 1), sf(n / 2 + 1);
    for (int i = 0; i < nc; ++i) rc[i] = coarse[i];
    fftw_execute_dft_r2c(plans.coarse_r2c, rc.p, sc.p);
    for (int k = 0; k <= n / 2; ++k) sf[k][0] = sf[k][1] = 0.0;
    // The coarse Nyquist bin carries no signal for a band-limited flux and is dropped.
    for (int k = 0; k < nc / 2; ++k) {
        sf[k][0] = sc[k][0] / nc;
        sf[k][1] = sc[k][1] / nc;
    }
    fftw_execute_dft_c2r(plans.fine_c2r, sf.p, rf.p);
    boost::random::normal_distribution<double> normal;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double lambda = std::max(rf[i], 0.0);
        out[i] = lambda + std::sqrt(lambda / dt) * normal(rng);
    }
    return out;
}

void forward(Simulator::Plans& plans, const std::vector<double>& x, Complex* out) {
    FftwBuffer<double> r(plans.n);
    for (int i = 0; i < plans.n; ++i) r[i] = x[i];
    fftw_execute_dft_r2c(plans.fine_r2c, r.p, out);
}

}  // namespace

void GridSpec::validate(const PlaneModel& m) const {
    if (!(spatial_step > 0.0 && spatial_step <= 0.25 + 1e-12))
        throw ConfigError("grid.spatial_step", "must be in (0, rho_plane/4]");
    if (!(dt > 0.0 && dt <= 1.0 / 20.0 + 1e-12)) throw ConfigError("grid.dt", "must satisfy dt <= T0/20");
    if (dt > 0.2 / m.bandwidth_product + 1e-12) throw ConfigError("grid.dt", "must satisfy dt <= 0.2/omegaB");
    if (coarse_points < 2 || points < coarse_points || points % coarse_points)
        throw ConfigError("grid.points", "photocurrent grid must refine the field grid by an integer factor");
}

GridSpec make_grid(const PlaneModel& m, double averaging_ratio, std::uint64_t seed, const McOptions& opt) {
    GridSpec g;
    g.spatial_step = opt.spatial_step;
    g.duration = averaging_ratio;
    g.seed = seed;
    g.coarse_points = good_size(static_cast<int>(std::ceil(averaging_ratio / opt.max_coarse_dt)));
    g.coarse_dt = averaging_ratio / g.coarse_points;
    const double target = std::min(1.0 / 20.0, 0.2 / m.bandwidth_product);
    const int refine = static_cast<int>(std::ceil(g.coarse_dt / target));
    g.points = refine * g.coarse_points;
    g.dt = averaging_ratio / g.points;
    const auto& mask = m.mask;
    switch (mask.shape()) {
        case MaskSpec::Shape::Disk: g.extent = mask.size(); break;
        case MaskSpec::Shape::GaussianSpot: g.extent = 4.5 * mask.size(); break;
        case MaskSpec::Shape::Uniform: g.extent = 3.0 * m.envelope_radius; break;
    }
    g.validate(m);
    return g;
}

Simulator::Simulator(const PlaneModel& m, double averaging_ratio, std::uint64_t seed, const McOptions& opt)
    : model_(m), opt_(opt) {
    if (m.kind == SourceKind::QuantumPhaseSensitive)
        throw UnsupportedState(
            "the quantum phase-sensitive state has no proper P representation; use the wick oracle (--oracle)");
    m.validate();
    grid_ = make_grid(m, averaging_ratio, seed, opt);
    if (grid_.coarse_dt > std::numbers::pi / (2.0 * opt.spectral_cutoff))
        throw ConfigError("mc.max_coarse_dt", "field grid cannot carry the flux bandwidth");
    const bool mirrored = is_phase_sensitive(m.kind) && m.field == FieldRegime::FarField;
    modes_ = build_modes(m, mirrored ? -m.pinhole_pos : m.pinhole_pos, opt.probes, opt.spatial_step,
                         opt.mode_tolerance);
    plans_ = std::make_unique<Plans>(grid_.coarse_points, grid_.points);
}

Simulator::~Simulator() = default;

namespace {

struct Synthesis {
    std::vector<double> pinhole_flux;
    std::vector<double> bucket_flux;
    std::vector<std::complex<double>> pinhole;
    std::vector<std::vector<std::complex<double>>> probes;
};

}  // namespace

static Synthesis synthesize(const PlaneModel& m, const GridSpec& g, const McOptions& opt, const ModalBasis& modes,
                            Simulator::Plans& plans, std::mt19937_64& rng, bool keep_fields) {
    const int nc = g.coarse_points;
    const int bins = static_cast<int>(std::floor(opt.spectral_cutoff * g.duration / (2.0 * std::numbers::pi)));
    const GaussianTerm term = plane_terms(m, KernelKind::PhaseInsensitiveAuto).front();
    const double tc = term.coherence_time;
    const double amp2 = term.amplitude.real();
    std::vector<double> bin_sd(2 * bins + 1);
    for (int b = -bins; b <= bins; ++b) {
        const double w = 2.0 * std::numbers::pi * b / g.duration;
        const double s = std::sqrt(2.0 * std::numbers::pi) * tc * std::exp(-0.5 * w * w * tc * tc);
        // complex normal with E|z|^2 = S / T: real and imaginary parts each carry half
        bin_sd[b + bins] = std::sqrt(0.5 * s / g.duration);
    }
    boost::random::normal_distribution<double> normal;
    auto draw = [&](Complex* spec) {
        for (int k = 0; k < nc; ++k) spec[k][0] = spec[k][1] = 0.0;
        for (int b = -bins; b <= bins; ++b) {
            const int k = b < 0 ? b + nc : b;
            spec[k][0] = bin_sd[b + bins] * normal(rng);
            spec[k][1] = bin_sd[b + bins] * normal(rng);
        }
    };

    const size_t nprobe = modes.probe_weight.size();
    FftwBuffer<Complex> spec(nc), z(nc), pin_spec(nc);
    std::vector<std::unique_ptr<FftwBuffer<Complex>>> probe_store;
    for (size_t p = 0; p < nprobe; ++p) {
        probe_store.push_back(std::make_unique<FftwBuffer<Complex>>(nc));
        for (int k = 0; k < nc; ++k) (*probe_store.back())[k][0] = (*probe_store.back())[k][1] = 0.0;
    }
    for (int k = 0; k < nc; ++k) pin_spec[k][0] = pin_spec[k][1] = 0.0;

    std::vector<double> bucket(nc, 0.0);
    for (size_t mode = 0; mode < modes.flux.size(); ++mode) {
        draw(spec.p);
        const double w = modes.pinhole_weight[mode];
        for (int k = 0; k < nc; ++k) {
            pin_spec[k][0] += w * spec[k][0];
            pin_spec[k][1] += w * spec[k][1];
        }
        for (size_t p = 0; p < nprobe; ++p) {
            const double wp = modes.probe_weight[p][mode];
            auto& ps = *probe_store[p];
            for (int k = 0; k < nc; ++k) {
                ps[k][0] += wp * spec[k][0];
                ps[k][1] += wp * spec[k][1];
            }
        }
        fftw_execute_dft(plans.field, spec.p, z.p);
        const double mu = modes.flux[mode];
        for (int i = 0; i < nc; ++i) bucket[i] += mu * (z[i][0] * z[i][0] + z[i][1] * z[i][1]);
    }
    if (modes.pinhole_residual > 0.0) {
        draw(spec.p);
        for (int k = 0; k < nc; ++k) {
            pin_spec[k][0] += modes.pinhole_residual * spec[k][0];
            pin_spec[k][1] += modes.pinhole_residual * spec[k][1];
        }
    }
    for (size_t p = 0; p < nprobe; ++p) {
        if (modes.probe_residual[p] <= 0.0) continue;
        draw(spec.p);
        auto& ps = *probe_store[p];
        for (int k = 0; k < nc; ++k) {
            ps[k][0] += modes.probe_residual[p] * spec[k][0];
            ps[k][1] += modes.probe_residual[p] * spec[k][1];
        }
    }
    fftw_execute_dft(plans.field, pin_spec.p, z.p);

    Synthesis out;
    const double pin_scale = m.eta * m.pinhole_area * amp2;
    const double bucket_scale = m.eta * amp2;
    out.pinhole_flux.resize(nc);
    out.bucket_flux.resize(nc);
    for (int i = 0; i < nc; ++i) {
        out.pinhole_flux[i] = pin_scale * (z[i][0] * z[i][0] + z[i][1] * z[i][1]);
        out.bucket_flux[i] = bucket_scale * (bucket[i] + modes.dropped_flux);
    }
    if (keep_fields) {
        const double s = std::sqrt(amp2);
        // E1 is the phase conjugate of the bucket-side field for phase-sensitive states.
        const bool conj = is_phase_sensitive(m.kind);
        out.pinhole.resize(nc);
        for (int i = 0; i < nc; ++i) out.pinhole[i] = {s * z[i][0], (conj ? -s : s) * z[i][1]};
        for (size_t p = 0; p < nprobe; ++p) {
            fftw_execute_dft(plans.field, probe_store[p]->p, z.p);
            std::vector<std::complex<double>> e(nc);
            for (int i = 0; i < nc; ++i) e[i] = {s * z[i][0], s * z[i][1]};
            out.probes.push_back(std::move(e));
        }
    }
    return out;
}

FieldSamples Simulator::synthesize_fields(std::uint64_t trial) const {
    auto rng = trial_engine(grid_.seed, trial);
    auto s = synthesize(model_, grid_, opt_, modes_, *plans_, rng, true);
    FieldSamples f;
    f.dt = grid_.coarse_dt;
    f.pinhole = std::move(s.pinhole);
    f.probes = std::move(s.probes);
    f.pinhole_flux = std::move(s.pinhole_flux);
    f.bucket_flux = std::move(s.bucket_flux);
    return f;
}

TrialResult Simulator::run_trial(std::uint64_t trial) const {
    auto rng = trial_engine(grid_.seed, trial);
    const auto s = synthesize(model_, grid_, opt_, modes_, *plans_, rng, false);
    const auto i1 = upsample_with_noise(*plans_, s.pinhole_flux, grid_.dt, rng);
    const auto i2 = upsample_with_noise(*plans_, s.bucket_flux, grid_.dt, rng);
    const int n = grid_.points;
    FftwBuffer<Complex> x1(n / 2 + 1), x2(n / 2 + 1);
    forward(*plans_, i1, x1.p);
    forward(*plans_, i2, x2.p);
    const auto h = filter_response(grid_, model_.bandwidth_product, model_.notch_product);
    double c = 0.0, p1 = 0.0, p2 = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
        const double mult = (2 * k == n) ? 1.0 : 2.0;
        const double h2 = h[k] * h[k] * mult;
        c += h2 * (x1[k][0] * x2[k][0] + x1[k][1] * x2[k][1]);
        p1 += h2 * (x1[k][0] * x1[k][0] + x1[k][1] * x1[k][1]);
        p2 += h2 * (x2[k][0] * x2[k][0] + x2[k][1] * x2[k][1]);
    }
    const double norm = 1.0 / (static_cast<double>(n) * n);
    TrialResult r;
    r.C_hat = c * norm;
    r.filtered_power_pinhole = p1 * norm;
    r.filtered_power_bucket = p2 * norm;
    for (int i = 0; i < grid_.coarse_points; ++i) {
        r.mean_flux_pinhole += s.pinhole_flux[i];
        r.mean_flux_bucket += s.bucket_flux[i];
    }
    r.mean_flux_pinhole /= grid_.coarse_points;
    r.mean_flux_bucket /= grid_.coarse_points;
    return r;
}

std::vector<double> detect(const std::vector<double>& coarse_flux, const GridSpec& grid, std::uint64_t seed,
                           std::uint64_t stream) {
    if (static_cast<int>(coarse_flux.size()) != grid.coarse_points)
        throw ConfigError("flux", "sample count does not match the field grid");
    Simulator::Plans plans(grid.coarse_points, grid.points);
    auto rng = trial_engine(seed, stream);
    return upsample_with_noise(plans, coarse_flux, grid.dt, rng);
}

std::vector<double> filter_response(const GridSpec& grid, double x, double xn) {
    std::vector<double> h(grid.points / 2 + 1, 0.0);
    for (size_t k = 1; k < h.size(); ++k) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / grid.duration;
        h[k] = std::exp(-2.0 * w * w / (x * x));
        if (xn > 0.0) h[k] -= std::exp(-2.0 * w * w / (xn * xn));
    }
    return h;
}

std::vector<double> apply_filter(const std::vector<double>& current, const GridSpec& grid, double x, double xn) {
    const int n = grid.points;
    if (static_cast<int>(current.size()) != n) throw ConfigError("current", "sample count does not match the grid");
    Simulator::Plans plans(grid.coarse_points, n);
    FftwBuffer<Complex> s(n / 2 + 1);
    FftwBuffer<double> r(n);
    forward(plans, current, s.p);
    const auto h = filter_response(grid, x, xn);
    for (int k = 0; k <= n / 2; ++k) {
        s[k][0] *= h[k] / n;
        s[k][1] *= h[k] / n;
    }
    fftw_execute_dft_c2r(plans.fine_c2r, s.p, r.p);
    return std::vector<double>(r.p, r.p + n);
}

Jackknife jackknife_snr(const std::vector<double>& x) {
    const size_t n = x.size();
    if (n < 3) throw ConfigError("trials", "jackknife needs at least 3 samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double s2 = 0.0;
    for (double v : x) s2 += (v - mean) * (v - mean);
    Jackknife j;
    j.value = mean * mean / (s2 / (n - 1));
    std::vector<double> theta(n);
    double tbar = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        const double mi = mean - d / (n - 1);
        // sum of squared deviations about the delete-one mean
        const double ss = s2 - d * d - (n - 1) * (mi - mean) * (mi - mean);
        theta[i] = mi * mi / (ss / (n - 2));
        tbar += theta[i];
    }
    tbar /= n;
    double acc = 0.0;
    for (double t : theta) acc += (t - tbar) * (t - tbar);
    j.std_error = std::sqrt(acc * (n - 1) / n);
    return j;
}

McEstimate estimate_snr(const PlaneModel& m, double averaging_ratio, int n_trials, std::uint64_t seed,
                        const McOptions& opt) {
    if (n_trials < 100) throw ConfigError("trials", "at least 100 trials are required");
    const double need = 100.0 * std::max(1.0, 1.0 / m.bandwidth_product);
    if (!(averaging_ratio >= need)) throw ConfigError("T_I", "averaging time must be at least 100 max(T0, 1/omegaB)");
    const Simulator sim(m, averaging_ratio, seed, opt);
    McEstimate est;
    est.n_trials = n_trials;
    est.modes = static_cast<int>(sim.modes().flux.size());
    double flux1 = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        const auto r = sim.run_trial(static_cast<std::uint64_t>(t));
        est.C_hat.push_back(r.C_hat);
        flux1 += r.mean_flux_pinhole;
    }
    flux1 /= n_trials;
    const auto jk = jackknife_snr(est.C_hat);
    est.snr_hat = jk.value;
    est.std_error = jk.std_error;
    double mean = 0.0;
    for (double c : est.C_hat) mean += c;
    mean /= n_trials;
    double var = 0.0;
    for (double c : est.C_hat) var += (c - mean) * (c - mean);
    var /= (n_trials - 1);
    est.mean_C = mean;
    est.variance_C = var;
    est.mean_stderr = std::sqrt(var / n_trials);
    est.inconclusive = !(est.std_error <= 0.5 * std::abs(est.snr_hat));

    const double lambda_dt = flux1 * sim.grid().dt;
    if (lambda_dt < 10.0)
        est.warnings.push_back("pinhole counts per step " + std::to_string(lambda_dt) +
                               " < 10: Gaussian shot-noise approximation matches only the first two moments");
    if (est.inconclusive) est.warnings.push_back("stderr exceeds half of SNR_hat; estimate inconclusive");

    if (m.mask.has_finite_area()) {
        NormalizedParams p;
        p.brightness = m.brightness;
        p.bandwidth_product = m.bandwidth_product;
        p.pinhole_ratio = 1.0 / m.pinhole_area;
        p.cells = m.mask.effective_area();
        p.eta = m.eta;
        const bool mirrored = is_phase_sensitive(m.kind) && m.field == FieldRegime::FarField;
        p.transmission = m.mask.transmissivity_at(mirrored ? -m.pinhole_pos : m.pinhole_pos);
        p.averaging_ratio = averaging_ratio;
        const Formula f = select_formula(m.kind, m.field, classify_band(m.bandwidth_product));
        const auto res = evaluate(f, p);
        est.analytic_ref = res.snr;
        for (const auto& w : res.warnings) est.warnings.push_back("closed form: " + w.message);
    }
    return est;
}

McEstimate estimate_snr(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo,
                        const MaskSpec& mask, double averaging_time, int n_trials, std::uint64_t seed,
                        const McOptions& opt) {
    const PlaneModel m = make_plane_model(src, det, geo, mask);
    McEstimate e = estimate_snr(m, averaging_time / src.coherence_time, n_trials, seed, opt);
    const double q2 = det.electron_charge * det.electron_charge;
    const double t2 = src.coherence_time * src.coherence_time;
    e.mean_C *= q2 / t2;
    e.mean_stderr *= q2 / t2;
    e.variance_C *= q2 * q2 / (t2 * t2);
    for (auto& c : e.C_hat) c *= q2 / t2;
    return e;
}

}  // namespace ghostsnr::mc
