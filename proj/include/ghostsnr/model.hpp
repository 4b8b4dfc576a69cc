#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ghostsnr/errors.hpp"

namespace ghostsnr {

enum class SourceKind { Thermal, ClassicalPhaseSensitive, QuantumPhaseSensitive };
enum class FieldRegime { NearField, FarField, Intermediate };
enum class BandRegime { Narrowband, Broadband, Intermediate };
enum class Plane { Source, Detection };

std::string to_string(SourceKind k);
std::string to_string(FieldRegime r);
std::string to_string(BandRegime r);
SourceKind parse_source_kind(const std::string& s);

inline bool is_phase_sensitive(SourceKind k) { return k != SourceKind::Thermal; }
inline bool is_classical(SourceKind k) { return k != SourceKind::QuantumPhaseSensitive; }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

// Factors used to decide "much greater" (>= strong) and "much less" (<= weak).
struct Thresholds {
    double strong = 10.0;
    double weak = 0.1;
};

struct SourceParams {
    double photon_flux = 0.0;       // P [photons/s]
    double beam_radius = 0.0;       // a0 [m]
    double coherence_radius = 0.0;  // rho0 [m]
    double coherence_time = 0.0;    // T0 [s]
    double wave_number = 0.0;       // k0 [1/m]
    SourceKind kind = SourceKind::Thermal;

    void validate(double max_coherence_ratio = 0.1) const;
};

struct DetectorParams {
    double eta = 1.0;
    double omega_B = 0.0;        // [rad/s]
    double omega_N = 0.0;        // [rad/s]
    double pinhole_area = 0.0;   // A1 [m^2]
    Vec2 pinhole_pos;            // rho1 [m]
    double electron_charge = 1.602176634e-19;

    void validate() const;
    void validate_with(const SourceParams& src) const;
};

class MaskSpec {
public:
    enum class Shape { Disk, GaussianSpot, Uniform };

    static MaskSpec disk(double radius, Vec2 center = {});
    // Field transmission exp(-|rho - center|^2 / waist^2).
    static MaskSpec gaussian_spot(double waist, Vec2 center = {});
    static MaskSpec uniform(double value);

    Shape shape() const { return shape_; }
    double size() const { return size_; }
    Vec2 center() const { return center_; }

    double transmissivity_at(Vec2 p) const;
    // A'_T = integral of |T|^4. Infinite for a nonzero Uniform mask.
    double effective_area() const;
    // Integral of |T|^2.
    double power_area() const;
    bool has_finite_area() const;
    // Same mask with every length divided by `unit`.
    MaskSpec scaled(double unit) const;
    void validate() const;

private:
    MaskSpec(Shape s, double size, Vec2 c) : shape_(s), size_(size), center_(c) {}
    Shape shape_;
    double size_;
    Vec2 center_;
};

std::string to_string(MaskSpec::Shape s);

struct GeometryParams {
    double path_length = 0.0;  // L [m]
    FieldRegime regime = FieldRegime::NearField;
};

struct FarFieldRadii {
    double beam_radius;       // a_L
    double coherence_radius;  // rho_L
};
FarFieldRadii far_field_radii(const SourceParams& src, double path_length);

struct Brightness {
    double value;
};
Brightness brightness(const SourceParams& src);

struct RegimeReport {
    double fresnel_cross = 0.0;      // k0 rho0 a0 / 2L
    double fresnel_coherence = 0.0;  // k0 rho0^2 / 2L
    double fresnel_beam = 0.0;       // k0 a0^2 / 2L
    double bandwidth_product = 0.0;  // Omega_B T0
    FieldRegime thermal_field = FieldRegime::Intermediate;
    FieldRegime phase_sensitive_field = FieldRegime::Intermediate;
    FieldRegime field = FieldRegime::Intermediate;  // for the source's own kind
    BandRegime band = BandRegime::Intermediate;
};
RegimeReport classify_regime(const SourceParams& src, const GeometryParams& geo,
                             const DetectorParams& det, const Thresholds& th = {});
BandRegime classify_band(double bandwidth_product, const Thresholds& th = {});

enum class KernelKind {
    PhaseInsensitiveAuto,
    PhaseInsensitiveCross,
    PhaseSensitiveCrossClassical,
    PhaseSensitiveCrossQuantum
};

// amplitude * exp(-(|r1|^2+|r2|^2)/a^2 - |r2 -/+ r1|^2/(2 rc^2) - (t2-t1)^2/(2 tc^2)),
// with the plus sign when `inverted`.
struct GaussianTerm {
    std::complex<double> amplitude;
    double envelope_radius;
    double coherence_radius;
    double coherence_time;
    bool inverted = false;
};

struct CorrelationKernel {
    KernelKind kind = KernelKind::PhaseInsensitiveAuto;
    SourceParams params;
    Plane plane = Plane::Source;
    GeometryParams geometry;
    std::vector<GaussianTerm> terms;
};

// Source-plane kernel. Throws UnsupportedState when the source kind has no such correlation.
CorrelationKernel make_kernel(KernelKind kind, const SourceParams& src, const GeometryParams& geo = {});
CorrelationKernel to_detection_plane(const CorrelationKernel& kernel, const GeometryParams& geo);
std::complex<double> eval_kernel(const CorrelationKernel& kernel, Vec2 r1, double t1, Vec2 r2, double t2);
std::complex<double> eval_terms(const std::vector<GaussianTerm>& terms, Vec2 r1, double t1, Vec2 r2, double t2);

// Fraunhofer image of one Gaussian term. `scale` is 2L/k0 in the units of the input radii;
// the output radii are in the same units.
GaussianTerm propagate_far(const GaussianTerm& term, double scale);

// Detection-plane description in units of the plane coherence radius and T0.
struct PlaneModel {
    SourceKind kind = SourceKind::Thermal;
    FieldRegime field = FieldRegime::NearField;
    double brightness = 1.0;         // I
    double envelope_radius = 100.0;  // a_plane / rho_plane
    double bandwidth_product = 10.0; // Omega_B T0
    double notch_product = 0.0;      // Omega_N T0
    double pinhole_area = 0.1;       // A1 / rho_plane^2
    double eta = 1.0;
    Vec2 pinhole_pos;                // rho1 / rho_plane
    MaskSpec mask = MaskSpec::gaussian_spot(10.0);

    void validate() const;
};

struct PlaneScales {
    double coherence_radius;  // rho_plane [m]
    double beam_radius;       // a_plane [m]
    double coherence_time;    // T0 [s]
};

PlaneModel make_plane_model(const SourceParams& src, const DetectorParams& det,
                            const GeometryParams& geo, const MaskSpec& mask);
PlaneScales plane_scales(const SourceParams& src, const GeometryParams& geo);

// Kernel terms of a plane model in its own units. Pinhole-side kernels for the cross
// correlations follow the detector-1 / detector-2 convention (pinhole = 1, bucket = 2).
std::vector<GaussianTerm> plane_terms(const PlaneModel& m, KernelKind kind);

}  // namespace ghostsnr
