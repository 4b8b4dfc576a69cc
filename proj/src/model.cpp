#include "ghostsnr/model.hpp"

#include <cmath>
#include <numbers>

namespace ghostsnr {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be a finite positive number");
}

FieldRegime classify_ratio(double ratio, const Thresholds& th) {
    if (ratio >= th.strong) return FieldRegime::NearField;
    if (ratio <= th.weak) return FieldRegime::FarField;
    return FieldRegime::Intermediate;
}

bool kernel_matches_kind(KernelKind k, SourceKind s) {
    switch (k) {
        case KernelKind::PhaseInsensitiveAuto: return true;
        case KernelKind::PhaseInsensitiveCross: return s == SourceKind::Thermal;
        case KernelKind::PhaseSensitiveCrossClassical: return s == SourceKind::ClassicalPhaseSensitive;
        case KernelKind::PhaseSensitiveCrossQuantum: return s == SourceKind::QuantumPhaseSensitive;
    }
    return false;
}

bool kernel_is_phase_sensitive(KernelKind k) {
    return k == KernelKind::PhaseSensitiveCrossClassical || k == KernelKind::PhaseSensitiveCrossQuantum;
}

// Source-plane terms with lengths in units of rho0, times in T0, amplitude in photons per rho0^2 per T0.
std::vector<GaussianTerm> normalized_source_terms(KernelKind kind, double brightness, double envelope) {
    const double amp = 2.0 * brightness / std::numbers::pi;
    std::vector<GaussianTerm> terms{{amp, envelope, 1.0, 1.0, false}};
    if (kind == KernelKind::PhaseSensitiveCrossQuantum) {
        const double c = std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(brightness);
        terms.push_back({std::complex<double>(0.0, c * amp), envelope, 1.0 / std::sqrt(2.0),
                         1.0 / std::sqrt(2.0), false});
    }
    return terms;
}

}  // namespace

std::string to_string(SourceKind k) {
    switch (k) {
        case SourceKind::Thermal: return "thermal";
        case SourceKind::ClassicalPhaseSensitive: return "classical-ps";
        case SourceKind::QuantumPhaseSensitive: return "quantum-ps";
    }
    return "?";
}

std::string to_string(FieldRegime r) {
    switch (r) {
        case FieldRegime::NearField: return "near";
        case FieldRegime::FarField: return "far";
        case FieldRegime::Intermediate: return "intermediate";
    }
    return "?";
}

std::string to_string(BandRegime r) {
    switch (r) {
        case BandRegime::Narrowband: return "narrowband";
        case BandRegime::Broadband: return "broadband";
        case BandRegime::Intermediate: return "intermediate";
    }
    return "?";
}

SourceKind parse_source_kind(const std::string& s) {
    if (s == "thermal") return SourceKind::Thermal;
    if (s == "classical-ps" || s == "classical_ps" || s == "classical") return SourceKind::ClassicalPhaseSensitive;
    if (s == "quantum-ps" || s == "quantum_ps" || s == "quantum") return SourceKind::QuantumPhaseSensitive;
    throw ConfigError("source.kind", "unknown source kind '" + s + "'");
}

void SourceParams::validate(double max_coherence_ratio) const {
    require_positive(photon_flux, "source.P");
    require_positive(beam_radius, "source.a0");
    require_positive(coherence_radius, "source.rho0");
    require_positive(coherence_time, "source.T0");
    require_positive(wave_number, "source.k0");
    if (coherence_radius / beam_radius > max_coherence_ratio)
        throw ConfigError("source.rho0", "coherence radius must be much smaller than the beam radius (rho0/a0 <= " +
                                             std::to_string(max_coherence_ratio) + ")");
}

void DetectorParams::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("detector.eta", "quantum efficiency must lie in (0, 1]");
    require_positive(omega_B, "detector.omegaB");
    if (!(omega_N >= 0.0) || !std::isfinite(omega_N)) throw ConfigError("detector.omegaN", "must be >= 0");
    if (omega_N > 0.1 * omega_B) throw ConfigError("detector.omegaN", "notch bandwidth must satisfy omegaN <= 0.1 omegaB");
    require_positive(pinhole_area, "detector.A1");
    require_positive(electron_charge, "detector.q");
}

void DetectorParams::validate_with(const SourceParams& src) const {
    validate();
    if (omega_N * src.coherence_time > 0.1) throw ConfigError("detector.omegaN", "requires omegaN * T0 <= 0.1");
}

FarFieldRadii far_field_radii(const SourceParams& src, double path_length) {
    require_positive(path_length, "geometry.L");
    return {2.0 * path_length / (src.wave_number * src.coherence_radius),
            2.0 * path_length / (src.wave_number * src.beam_radius)};
}

Brightness brightness(const SourceParams& src) {
    src.validate();
    const double ratio = src.coherence_radius / src.beam_radius;
    return {src.photon_flux * src.coherence_time * ratio * ratio};
}

BandRegime classify_band(double x, const Thresholds& th) {
    if (x >= th.strong) return BandRegime::Narrowband;
    if (x <= th.weak) return BandRegime::Broadband;
    return BandRegime::Intermediate;
}

RegimeReport classify_regime(const SourceParams& src, const GeometryParams& geo, const DetectorParams& det,
                             const Thresholds& th) {
    require_positive(geo.path_length, "geometry.L");
    RegimeReport r;
    const double two_l = 2.0 * geo.path_length;
    r.fresnel_cross = src.wave_number * src.coherence_radius * src.beam_radius / two_l;
    r.fresnel_coherence = src.wave_number * src.coherence_radius * src.coherence_radius / two_l;
    r.fresnel_beam = src.wave_number * src.beam_radius * src.beam_radius / two_l;
    r.bandwidth_product = det.omega_B * src.coherence_time;
    r.thermal_field = classify_ratio(r.fresnel_cross, th);
    if (r.fresnel_coherence >= th.strong)
        r.phase_sensitive_field = FieldRegime::NearField;
    else if (r.fresnel_beam <= th.weak)
        r.phase_sensitive_field = FieldRegime::FarField;
    else
        r.phase_sensitive_field = FieldRegime::Intermediate;
    r.field = is_phase_sensitive(src.kind) ? r.phase_sensitive_field : r.thermal_field;
    r.band = classify_band(r.bandwidth_product, th);
    return r;
}

CorrelationKernel make_kernel(KernelKind kind, const SourceParams& src, const GeometryParams& geo) {
    src.validate();
    if (!kernel_matches_kind(kind, src.kind))
        throw UnsupportedState("source kind " + to_string(src.kind) + " has no correlation of the requested type");
    CorrelationKernel k;
    k.kind = kind;
    k.params = src;
    k.plane = Plane::Source;
    k.geometry = geo;
    const double I = brightness(src).value;
    // Convert normalized terms back to SI.
    const double len = src.coherence_radius;
    const double amp_unit = 1.0 / (len * len * src.coherence_time);
    for (auto t : normalized_source_terms(kind, I, src.beam_radius / len)) {
        t.amplitude *= amp_unit;
        t.envelope_radius *= len;
        t.coherence_radius *= len;
        t.coherence_time *= src.coherence_time;
        k.terms.push_back(t);
    }
    return k;
}

GaussianTerm propagate_far(const GaussianTerm& term, double scale) {
    GaussianTerm out = term;
    out.envelope_radius = scale / term.coherence_radius;
    out.coherence_radius = scale / term.envelope_radius;
    out.amplitude = term.amplitude * (term.envelope_radius * term.coherence_radius) /
                    (out.envelope_radius * out.coherence_radius);
    return out;
}

CorrelationKernel to_detection_plane(const CorrelationKernel& kernel, const GeometryParams& geo) {
    if (geo.regime == FieldRegime::Intermediate)
        throw UnsupportedRegime("no detection-plane kernel is available at intermediate Fresnel number");
    if (kernel.plane == Plane::Detection) {
        if (geo.regime == FieldRegime::NearField) return kernel;
        throw UnsupportedRegime("kernel is already in a detection plane");
    }
    CorrelationKernel out = kernel;
    out.plane = Plane::Detection;
    out.geometry = geo;
    if (geo.regime == FieldRegime::NearField) return out;
    require_positive(geo.path_length, "geometry.L");
    const double scale = 2.0 * geo.path_length / kernel.params.wave_number;
    const bool ps = kernel_is_phase_sensitive(kernel.kind);
    for (auto& t : out.terms) {
        t = propagate_far(t, scale);
        if (ps) t.inverted = !t.inverted;
    }
    return out;
}

std::complex<double> eval_terms(const std::vector<GaussianTerm>& terms, Vec2 r1, double t1, Vec2 r2, double t2) {
    std::complex<double> sum = 0.0;
    const double dt = t2 - t1;
    for (const auto& t : terms) {
        const double s = t.inverted ? 1.0 : -1.0;
        const Vec2 d{r2.x + s * r1.x, r2.y + s * r1.y};
        const double a2 = t.envelope_radius * t.envelope_radius;
        const double c2 = t.coherence_radius * t.coherence_radius;
        const double tc2 = t.coherence_time * t.coherence_time;
        const double e = (norm2(r1) + norm2(r2)) / a2 + norm2(d) / (2.0 * c2) + dt * dt / (2.0 * tc2);
        sum += t.amplitude * std::exp(-e);
    }
    return sum;
}

std::complex<double> eval_kernel(const CorrelationKernel& kernel, Vec2 r1, double t1, Vec2 r2, double t2) {
    return eval_terms(kernel.terms, r1, t1, r2, t2);
}

void PlaneModel::validate() const {
    require_positive(brightness, "source.I");
    require_positive(envelope_radius, "source.a0_over_rho0");
    require_positive(bandwidth_product, "detector.omegaB_T0");
    if (!(notch_product >= 0.0)) throw ConfigError("detector.omegaN_T0", "must be >= 0");
    if (notch_product > 0.1 * bandwidth_product)
        throw ConfigError("detector.omegaN_T0", "notch bandwidth must satisfy omegaN <= 0.1 omegaB");
    if (notch_product > 0.1) throw ConfigError("detector.omegaN_T0", "requires omegaN * T0 <= 0.1");
    require_positive(pinhole_area, "detector.A1");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("detector.eta", "quantum efficiency must lie in (0, 1]");
    if (field == FieldRegime::Intermediate)
        throw UnsupportedRegime("no detection-plane kernel is available at intermediate Fresnel number");
    mask.validate();
}

PlaneScales plane_scales(const SourceParams& src, const GeometryParams& geo) {
    if (geo.regime == FieldRegime::Intermediate)
        throw UnsupportedRegime("no detection-plane kernel is available at intermediate Fresnel number");
    if (geo.regime == FieldRegime::NearField)
        return {src.coherence_radius, src.beam_radius, src.coherence_time};
    const auto ff = far_field_radii(src, geo.path_length);
    return {ff.coherence_radius, ff.beam_radius, src.coherence_time};
}

PlaneModel make_plane_model(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo,
                            const MaskSpec& mask) {
    src.validate();
    det.validate_with(src);
    mask.validate();
    const PlaneScales s = plane_scales(src, geo);
    PlaneModel m;
    m.kind = src.kind;
    m.field = geo.regime;
    m.brightness = brightness(src).value;
    m.envelope_radius = s.beam_radius / s.coherence_radius;
    m.bandwidth_product = det.omega_B * src.coherence_time;
    m.notch_product = det.omega_N * src.coherence_time;
    m.pinhole_area = det.pinhole_area / (s.coherence_radius * s.coherence_radius);
    m.eta = det.eta;
    m.pinhole_pos = (1.0 / s.coherence_radius) * det.pinhole_pos;
    m.mask = mask.scaled(s.coherence_radius);
    return m;
}

std::vector<GaussianTerm> plane_terms(const PlaneModel& m, KernelKind kind) {
    if (!kernel_matches_kind(kind, m.kind))
        throw UnsupportedState("source kind " + to_string(m.kind) + " has no correlation of the requested type");
    auto terms = normalized_source_terms(kind, m.brightness, m.envelope_radius);
    if (m.field == FieldRegime::FarField) {
        const bool ps = kernel_is_phase_sensitive(kind);
        for (auto& t : terms) {
            t = propagate_far(t, m.envelope_radius);
            if (ps) t.inverted = !t.inverted;
        }
    } else if (m.field == FieldRegime::Intermediate) {
        throw UnsupportedRegime("no detection-plane kernel is available at intermediate Fresnel number");
    }
    return terms;
}

}  // namespace ghostsnr
