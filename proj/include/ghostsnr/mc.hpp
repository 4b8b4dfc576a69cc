#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ghostsnr/model.hpp"

namespace ghostsnr::mc {

// Lengths in units of the detection-plane coherence radius, times in units of T0.
struct GridSpec {
    double spatial_step = 0.25;  // bucket-plane grid step
    double extent = 0.0;         // half-width of the bucket-plane window
    double coarse_dt = 0.0;      // field synthesis step
    int coarse_points = 0;
    double dt = 0.0;             // photocurrent step
    int points = 0;
    double duration = 0.0;       // T_I / T0
    std::uint64_t seed = 0;

    void validate(const PlaneModel& m) const;
};

struct McOptions {
    double spatial_step = 0.25;
    double mode_tolerance = 1e-3;    // dropped fraction of bucket flux and of the ghost-image weight
    double spectral_cutoff = 8.5;    // |omega| T0 beyond which field bins are not drawn
    double max_coarse_dt = 0.18;
    std::vector<Vec2> probes;        // extra bucket-plane points reported by synthesize_fields
};

GridSpec make_grid(const PlaneModel& m, double averaging_ratio, std::uint64_t seed, const McOptions& opt = {});

// Reduction of the bucket-plane field to the modes of the mask-weighted kernel. The field at a point p
// is sum_k weight_k(p) z_k + residual(p) z_perp, with z_k independent unit-variance processes; the
// bucket flux is sum_k flux_k |z_k|^2 (kernel amplitude 1).
struct ModalBasis {
    std::vector<double> flux;             // per kept mode
    std::vector<double> pinhole_weight;   // per kept mode
    double pinhole_residual = 0.0;        // standard deviation of the unresolved part
    std::vector<std::vector<double>> probe_weight;
    std::vector<double> probe_residual;
    double dropped_flux = 0.0;
    double total_flux = 0.0;
    int grid_points = 0;
};

ModalBasis build_modes(const PlaneModel& m, Vec2 pinhole_point, const std::vector<Vec2>& probes,
                       double spatial_step, double tolerance);

struct FieldSamples {
    double dt = 0.0;
    std::vector<std::complex<double>> pinhole;              // E1 at rho1
    std::vector<std::vector<std::complex<double>>> probes;  // E2 at the probe points
    std::vector<double> pinhole_flux;                       // eta A1 |E1|^2
    std::vector<double> bucket_flux;                        // eta int |T|^2 |E2|^2
};

struct TrialResult {
    double C_hat = 0.0;
    double mean_flux_pinhole = 0.0;
    double mean_flux_bucket = 0.0;
    double filtered_power_pinhole = 0.0;
    double filtered_power_bucket = 0.0;
};

class Simulator {
public:
    Simulator(const PlaneModel& m, double averaging_ratio, std::uint64_t seed, const McOptions& opt = {});
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    const GridSpec& grid() const { return grid_; }
    const ModalBasis& modes() const { return modes_; }
    const PlaneModel& model() const { return model_; }

    FieldSamples synthesize_fields(std::uint64_t trial) const;
    TrialResult run_trial(std::uint64_t trial) const;

    struct Plans;

private:
    PlaneModel model_;
    GridSpec grid_;
    McOptions opt_;
    ModalBasis modes_;
    std::unique_ptr<Plans> plans_;
};

// Upsamples a band-limited coarse flux (photons per T0) to the photocurrent grid and adds Gaussian
// shot noise; returns the current sampled at grid.dt.
std::vector<double> detect(const std::vector<double>& coarse_flux, const GridSpec& grid, std::uint64_t seed,
                           std::uint64_t stream);
// Filter response |H_B| at the discrete frequencies of the photocurrent grid, DC bin zero.
std::vector<double> filter_response(const GridSpec& grid, double bandwidth_product, double notch_product);
std::vector<double> apply_filter(const std::vector<double>& current, const GridSpec& grid, double bandwidth_product,
                                 double notch_product);

struct Jackknife {
    double value = 0.0;
    double std_error = 0.0;
};
// SNR = mean^2 / sample variance with its delete-one jackknife standard error.
Jackknife jackknife_snr(const std::vector<double>& samples);

struct McEstimate {
    double snr_hat = 0.0;
    double std_error = 0.0;
    int n_trials = 0;
    double analytic_ref = 0.0;
    double mean_C = 0.0;
    double mean_stderr = 0.0;
    double variance_C = 0.0;
    bool inconclusive = false;
    int modes = 0;
    std::vector<double> C_hat;
    std::vector<std::string> warnings;
};

McEstimate estimate_snr(const PlaneModel& m, double averaging_ratio, int n_trials, std::uint64_t seed,
                        const McOptions& opt = {});
McEstimate estimate_snr(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo,
                        const MaskSpec& mask, double averaging_time, int n_trials, std::uint64_t seed,
                        const McOptions& opt = {});

}  // namespace ghostsnr::mc
