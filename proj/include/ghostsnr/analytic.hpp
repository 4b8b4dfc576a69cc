#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghostsnr/model.hpp"

namespace ghostsnr {

// Dimensionless inputs of every closed form.
struct NormalizedParams {
    double brightness = 1.0;         // I
    double bandwidth_product = 10.0; // Omega_B T0
    double pinhole_ratio = 10.0;     // rho^2 / A1
    double cells = 1e4;              // A'_T / rho^2
    double eta = 0.9;
    double transmission = 1.0;       // |T| at the evaluation point
    double averaging_ratio = 1.0;    // T_I / T0

    void validate() const;
};

enum class Formula {
    ThermalNarrowband,
    ThermalBroadband,
    QuantumNarrowbandNear,
    QuantumBroadbandNear,
    QuantumNarrowbandFar,
    QuantumBroadbandFar
};
std::string to_string(Formula f);
Formula select_formula(SourceKind kind, FieldRegime field, BandRegime band);

struct NoiseTerm {
    std::string label;
    double value;
};

struct Asymptotes {
    double low_brightness = 0.0;
    double high_brightness = 0.0;
};

struct RegimeWarning {
    std::string code;
    std::string message;
};

struct SnrResult {
    Formula formula = Formula::ThermalNarrowband;
    double snr = 0.0;
    double snr_normalized = 0.0;  // snr * T0 / T_I
    double numerator = 0.0;       // snr_normalized = numerator / sum(noise_terms)
    std::vector<NoiseTerm> noise_terms;
    std::string dominant_term;
    Asymptotes asymptotes;             // same units as snr
    Asymptotes asymptotes_normalized;  // same units as snr_normalized
    RegimeReport regime;
    std::vector<RegimeWarning> warnings;
};

// Closed-form evaluation with guard warnings; no regime report.
SnrResult evaluate(Formula f, const NormalizedParams& p, const Thresholds& th = {});
Asymptotes normalized_asymptotes(Formula f, const NormalizedParams& p);

struct SnrQuery {
    SourceParams src;
    DetectorParams det;
    GeometryParams geo;
    MaskSpec mask = MaskSpec::gaussian_spot(1.0);
    double averaging_time = 0.0;            // T_I [s]
    std::optional<Vec2> eval_point;         // defaults to the pinhole position
    std::optional<double> cells_override;   // A'_T / rho_plane^2, required for Uniform masks
    Thresholds thresholds;
    double averaging_guard = 100.0;         // T_I >= guard * max(T0, 1/Omega_B)
};

struct NormalizedQuery {
    NormalizedParams params;
    RegimeReport regime;
    FieldRegime field;
    std::vector<RegimeWarning> warnings;
};
NormalizedQuery normalize(const SnrQuery& q);

SnrResult snr_thermal_narrowband(const SnrQuery& q);
SnrResult snr_thermal_broadband(const SnrQuery& q);
SnrResult snr_classical_ps(const SnrQuery& q);
SnrResult snr_quantum_narrowband_near(const SnrQuery& q);
SnrResult snr_quantum_broadband_near(const SnrQuery& q);
SnrResult snr_quantum_narrowband_far(const SnrQuery& q);
SnrResult snr_quantum_broadband_far(const SnrQuery& q);
// Dispatches on kind, declared field regime and band.
SnrResult snr(const SnrQuery& q);

// SNR_normalized(I) = tau^4 (1 + k/I)^2 / sum_j c[j] I^-j for every closed form.
struct BrightnessPolynomial {
    double scale = 1.0;  // tau^4
    double k = 0.0;
    double c[4] = {0.0, 0.0, 0.0, 0.0};
    double operator()(double I) const;
};
BrightnessPolynomial brightness_polynomial(Formula f, const NormalizedParams& p);

struct OptimalBrightness {
    double I_opt = 0.0;
    double snr_normalized_at_opt = 0.0;
    double snr_at_opt = 0.0;
    bool monotone = false;          // no interior maximum; I_opt is the scan edge
    bool from_polynomial = false;   // false when the grid fallback was used
    double grid_I_opt = 0.0;
    std::string note;
};
OptimalBrightness optimal_brightness(Formula f, const NormalizedParams& p, double I_min = 1e-8, double I_max = 1e8,
                                     int grid_points = 400);
OptimalBrightness optimal_brightness(const SnrQuery& q);

}  // namespace ghostsnr
