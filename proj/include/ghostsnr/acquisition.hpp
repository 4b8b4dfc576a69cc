#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghostsnr/analytic.hpp"

namespace ghostsnr {

// One imager in an acquisition-time comparison, in normalized parameters. averaging_ratio is ignored.
struct AcquisitionSide {
    SourceKind kind = SourceKind::Thermal;
    FieldRegime field = FieldRegime::NearField;
    BandRegime band = BandRegime::Narrowband;
    NormalizedParams params;
    double coherence_time = 1.0;  // T0 [s]; only ratios of the two sides matter
};

struct AcquisitionQuery {
    AcquisitionSide classical;
    AcquisitionSide quantum;
    double target_snr = 10.0;
};

// Builds a side from physical parameters; the band comes from Omega_B T0.
AcquisitionSide make_side(const SnrQuery& q);

double time_ratio_narrowband(const AcquisitionQuery& q);
double time_ratio_broadband(const AcquisitionQuery& q);
double time_ratio_cross_band(const AcquisitionQuery& q);

struct AcquisitionReport {
    std::string comparison;          // narrowband, broadband, cross-band, inversion
    double ratio = 0.0;              // T_I(q) / T_I(c)
    double time_quantum = 0.0;       // [s] from the asymptote used by the ratio
    double time_classical = 0.0;     // [s]
    double ratio_full = 0.0;         // from inverting the complete closed forms
    double time_quantum_full = 0.0;
    double time_classical_full = 0.0;
    double consistency = 0.0;        // |ratio / ratio_full - 1|
    bool degenerate = false;
    std::vector<RegimeWarning> warnings;
};

// Picks the comparison from the band selectors. Two classical sides (or band pairs without a closed
// ratio) fall back to inverting the complete closed forms.
AcquisitionReport compare_acquisition(const AcquisitionQuery& q);

// Averaging time [s] at which a closed form reaches the target SNR.
double averaging_time_for(const AcquisitionSide& s, double target_snr);

}  // namespace ghostsnr
