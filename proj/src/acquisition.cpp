#include "ghostsnr/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ghostsnr {

namespace {

constexpr double kBright = 1e3;
constexpr double kDim = 0.1;

const double kPiRootPi = std::numbers::pi * std::sqrt(std::numbers::pi);

// Omega_B a0^2 / (eta^2 P A'_T) * (rho0^2 / A1) * |T|^2 in normalized variables.
double flux_factor(const NormalizedParams& p) {
    return p.bandwidth_product * p.pinhole_ratio * p.transmission * p.transmission /
           (p.eta * p.eta * p.brightness * p.cells);
}

void check_sides(const AcquisitionQuery& q) {
    if (!is_classical(q.classical.kind))
        throw ConfigError("classical.source.kind", "the classical side needs a thermal or classical phase-sensitive source");
    if (q.quantum.kind != SourceKind::QuantumPhaseSensitive)
        throw ConfigError("quantum.source.kind", "the quantum side needs a quantum phase-sensitive source");
    if (!(q.target_snr > 0.0)) throw ConfigError("target_snr", "must be positive");
    auto validate = [](const AcquisitionSide& s) {
        NormalizedParams p = s.params;
        p.averaging_ratio = 1.0;
        p.validate();
        if (!(s.coherence_time > 0.0)) throw ConfigError("source.T0", "must be positive");
    };
    validate(q.classical);
    validate(q.quantum);
}

Formula formula_of(const AcquisitionSide& s) {
    return select_formula(s.kind, s.field, s.band);
}

double full_time(const AcquisitionSide& s, double target) {
    NormalizedParams p = s.params;
    p.averaging_ratio = 1.0;
    const double norm = evaluate(formula_of(s), p).snr_normalized;
    return norm > 0.0 ? target * s.coherence_time / norm : std::numeric_limits<double>::infinity();
}

}  // namespace

AcquisitionSide make_side(const SnrQuery& q) {
    SnrQuery qq = q;
    if (!(qq.averaging_time > 0.0)) qq.averaging_time = 1.0;
    const NormalizedQuery nq = normalize(qq);
    AcquisitionSide s;
    s.kind = q.src.kind;
    s.field = nq.field;
    s.band = classify_band(nq.params.bandwidth_product, q.thresholds);
    s.params = nq.params;
    s.coherence_time = q.src.coherence_time;
    return s;
}

double time_ratio_narrowband(const AcquisitionQuery& q) {
    check_sides(q);
    return kPiRootPi / (8.0 * std::numbers::sqrt2) * flux_factor(q.quantum.params);
}

double time_ratio_broadband(const AcquisitionQuery& q) {
    check_sides(q);
    return kPiRootPi / (4.0 * std::numbers::sqrt2) * flux_factor(q.quantum.params);
}

double time_ratio_cross_band(const AcquisitionQuery& q) {
    check_sides(q);
    // Omega_B(q) T0(c) = (Omega_B T0)(q) * T0(c) / T0(q)
    const double product = q.quantum.params.bandwidth_product * q.classical.coherence_time / q.quantum.coherence_time;
    return kPiRootPi / std::numbers::sqrt2 * flux_factor(q.quantum.params) / product;
}

double averaging_time_for(const AcquisitionSide& s, double target_snr) {
    if (!(target_snr > 0.0)) throw ConfigError("target_snr", "must be positive");
    return full_time(s, target_snr);
}

AcquisitionReport compare_acquisition(const AcquisitionQuery& q) {
    AcquisitionReport r;
    if (!(q.target_snr > 0.0)) throw ConfigError("target_snr", "must be positive");

    if (is_classical(q.quantum.kind)) {
        // Two classical imagers: no closed ratio, invert the complete formulas.
        if (!is_classical(q.classical.kind))
            throw ConfigError("classical.source.kind", "the classical side needs a thermal or classical phase-sensitive source");
        r.comparison = "inversion";
        r.time_quantum_full = r.time_quantum = full_time(q.quantum, q.target_snr);
        r.time_classical_full = r.time_classical = full_time(q.classical, q.target_snr);
        r.ratio_full = r.ratio = r.time_quantum / r.time_classical;
        return r;
    }
    check_sides(q);

    const bool qn = q.quantum.band != BandRegime::Broadband;
    const bool cn = q.classical.band != BandRegime::Broadband;
    if (qn && cn) {
        r.comparison = "narrowband";
        r.ratio = time_ratio_narrowband(q);
    } else if (!qn && !cn) {
        r.comparison = "broadband";
        r.ratio = time_ratio_broadband(q);
    } else if (!qn && cn) {
        r.comparison = "cross-band";
        r.ratio = time_ratio_cross_band(q);
    } else {
        r.comparison = "inversion";
        r.warnings.push_back({"band", "no closed ratio for a narrowband quantum source against a broadband classical "
                                      "source; using the asymptote inversion"});
    }
    if (q.quantum.field != FieldRegime::NearField || q.classical.field != FieldRegime::NearField) {
        r.warnings.push_back({"field", "closed ratios hold in the near field; using the asymptote inversion"});
        r.comparison = "inversion";
    }
    for (const auto* s : {&q.quantum, &q.classical})
        if (s->band == BandRegime::Intermediate)
            r.warnings.push_back({"band", "Omega_B T0 lies between the narrowband and broadband limits"});
    if (q.classical.params.brightness < kBright)
        r.warnings.push_back({"classical-brightness", "classical side is below the bright-source saturation regime (I < 1e3)"});
    if (q.quantum.params.brightness > kDim)
        r.warnings.push_back({"quantum-brightness", "quantum side is not in the low-brightness regime (I > 0.1)"});

    // Asymptote inversion: classical saturation against the quantum low-brightness limit.
    NormalizedParams pc = q.classical.params, pq = q.quantum.params;
    pc.averaging_ratio = pq.averaging_ratio = 1.0;
    const double high_c = normalized_asymptotes(formula_of(q.classical), pc).high_brightness;
    const double low_q = normalized_asymptotes(formula_of(q.quantum), pq).low_brightness;
    r.time_classical = q.target_snr * q.classical.coherence_time / high_c;
    r.time_quantum = low_q > 0.0 ? q.target_snr * q.quantum.coherence_time / low_q
                                 : std::numeric_limits<double>::infinity();
    if (r.comparison == "inversion") r.ratio = r.time_quantum / r.time_classical;

    if (q.quantum.params.transmission == 0.0) {
        r.degenerate = true;
        r.ratio = 0.0;
        r.warnings.push_back({"degenerate", "|T(rho1)| = 0: no ghost-image signal at the evaluation point"});
    }

    r.time_quantum_full = full_time(q.quantum, q.target_snr);
    r.time_classical_full = full_time(q.classical, q.target_snr);
    r.ratio_full = r.time_quantum_full / r.time_classical_full;
    r.consistency = r.degenerate ? 0.0 : std::abs(r.ratio / r.ratio_full - 1.0);
    if (r.consistency > 0.1)
        r.warnings.push_back({"consistency", "ratio differs from the complete-formula inversion by more than 10%"});
    return r;
}

}  // namespace ghostsnr
