#include "ghostsnr/analytic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ghostsnr {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);
const double sqrt2 = std::sqrt(2.0);
const double sqrt3 = std::sqrt(3.0);

bool is_narrowband(Formula f) {
    return f == Formula::ThermalNarrowband || f == Formula::QuantumNarrowbandNear || f == Formula::QuantumNarrowbandFar;
}

bool is_quantum(Formula f) { return f != Formula::ThermalNarrowband && f != Formula::ThermalBroadband; }

// Coefficient of the accidental-pair correction u = k / I in the quantum numerators.
double pair_coefficient(Formula f) {
    switch (f) {
        case Formula::QuantumNarrowbandNear: return 1.0 / std::sqrt(2.0 * pi);
        case Formula::QuantumNarrowbandFar: return 1.0 / std::sqrt(8.0 * pi);
        case Formula::QuantumBroadbandNear: return 1.0 / (2.0 * sqrt_pi);
        case Formula::QuantumBroadbandFar: return 1.0 / (4.0 * sqrt_pi);
        default: return 0.0;
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

void add_guard_warnings(Formula f, const NormalizedParams& p, const Thresholds& th, std::vector<RegimeWarning>& w) {
    const double x = p.bandwidth_product;
    if (is_narrowband(f) && x < th.strong)
        w.push_back({"band", "Omega_B T0 = " + fmt(x) + " is not in the narrowband regime (needs >= " + fmt(th.strong) + ")"});
    if (!is_narrowband(f) && x > th.weak)
        w.push_back({"band", "Omega_B T0 = " + fmt(x) + " is not in the broadband regime (needs <= " + fmt(th.weak) + ")"});
    const double cells_needed = is_narrowband(f) ? 30.0 * th.strong : 12.0 * th.strong * x;
    if (p.cells < cells_needed)
        w.push_back({"cells", "A'_T/rho^2 = " + fmt(p.cells) + " is below the required " + fmt(cells_needed)});
    if (p.pinhole_ratio < th.strong)
        w.push_back({"pinhole", "rho^2/A1 = " + fmt(p.pinhole_ratio) + " is too small for the point-pinhole approximation"});
    const double guard = 100.0;
    if (p.averaging_ratio < guard || x * p.averaging_ratio < guard)
        w.push_back({"averaging", "T_I must exceed 100 max(T0, 1/Omega_B); SNR is still reported per T_I/T0"});
    if (is_quantum(f)) {
        const double flux = p.eta * p.brightness * p.cells / x;
        if (flux > th.weak)
            w.push_back({"low-flux", "eta P A'_T/(Omega_B a^2) = " + fmt(flux) +
                                         " so the linear low-flux asymptote does not describe this point"});
    }
}

}  // namespace

void NormalizedParams::validate() const {
    auto pos = [](double v, const char* f) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(f, "must be a finite positive number");
    };
    pos(brightness, "source.I");
    pos(bandwidth_product, "detector.omegaB_T0");
    pos(pinhole_ratio, "detector.rho0sq_over_A1");
    pos(cells, "mask.AT_prime_over_rho0sq");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("detector.eta", "quantum efficiency must lie in (0, 1]");
    if (!(transmission >= 0.0 && transmission <= 1.0)) throw ConfigError("mask.transmission", "|T| must lie in [0, 1]");
    pos(averaging_ratio, "correlator.TI_over_T0");
}

std::string to_string(Formula f) {
    switch (f) {
        case Formula::ThermalNarrowband: return "thermal-narrowband";
        case Formula::ThermalBroadband: return "thermal-broadband";
        case Formula::QuantumNarrowbandNear: return "quantum-narrowband-near";
        case Formula::QuantumBroadbandNear: return "quantum-broadband-near";
        case Formula::QuantumNarrowbandFar: return "quantum-narrowband-far";
        case Formula::QuantumBroadbandFar: return "quantum-broadband-far";
    }
    return "?";
}

Formula select_formula(SourceKind kind, FieldRegime field, BandRegime band) {
    if (field == FieldRegime::Intermediate)
        throw UnsupportedRegime("no closed form is available at intermediate Fresnel number");
    const bool narrow = band != BandRegime::Broadband;
    if (kind != SourceKind::QuantumPhaseSensitive) return narrow ? Formula::ThermalNarrowband : Formula::ThermalBroadband;
    if (field == FieldRegime::NearField) return narrow ? Formula::QuantumNarrowbandNear : Formula::QuantumBroadbandNear;
    return narrow ? Formula::QuantumNarrowbandFar : Formula::QuantumBroadbandFar;
}

Asymptotes normalized_asymptotes(Formula f, const NormalizedParams& p) {
    const double I = p.brightness, x = p.bandwidth_product, r = p.pinhole_ratio, n = p.cells, eta = p.eta;
    const double t2 = p.transmission * p.transmission;
    const double t4 = t2 * t2;
    const double narrow_high = std::sqrt(2.0 * pi) * t4 / n;
    const double broad_high = sqrt_pi * x * t4 / (2.0 * sqrt2 * n);
    switch (f) {
        case Formula::ThermalNarrowband:
            return {16.0 * sqrt2 / sqrt_pi * eta * eta * I * I * t2 / (r * x), narrow_high};
        case Formula::ThermalBroadband:
            return {4.0 / sqrt_pi * eta * eta * I * I * t2 / r, broad_high};
        case Formula::QuantumNarrowbandNear:
            return {16.0 / pi * eta * eta * I * t2 / (r * x), narrow_high};
        case Formula::QuantumBroadbandNear:
            return {2.0 / pi * eta * eta * I * t2 / r, broad_high};
        case Formula::QuantumNarrowbandFar:
            return {8.0 / pi * eta * eta * I * t2 / (r * x), narrow_high};
        case Formula::QuantumBroadbandFar:
            return {1.0 / pi * eta * eta * I * t2 / r, broad_high};
    }
    return {};
}

SnrResult evaluate(Formula f, const NormalizedParams& p, const Thresholds& th) {
    p.validate();
    const double I = p.brightness, x = p.bandwidth_product, r = p.pinhole_ratio, n = p.cells, eta = p.eta;
    const double t2 = p.transmission * p.transmission;
    const double t4 = t2 * t2;
    const double k = pair_coefficient(f);
    const double one_u = 1.0 + k / I;

    SnrResult res;
    res.formula = f;
    auto& terms = res.noise_terms;
    switch (f) {
        case Formula::ThermalNarrowband:
            res.numerator = t4;
            terms = {{"excess", n / std::sqrt(2.0 * pi)},
                     {"cross-beat-a", t2 / (eta * I)},
                     {"cross-beat-b", 4.0 * pi * r * t4 / (3.0 * eta * I)},
                     {"shot", sqrt_pi * x * r * t2 / (16.0 * sqrt2 * eta * eta * I * I)}};
            break;
        case Formula::ThermalBroadband:
            res.numerator = t4;
            terms = {{"excess", 2.0 * sqrt2 * n / (sqrt_pi * x)},
                     {"cross-beat-a", 2.0 * t2 / (sqrt3 * eta * I)},
                     {"cross-beat-b", 8.0 * pi * r * t4 / (3.0 * sqrt3 * eta * I)},
                     {"shot", sqrt_pi * r * t2 / (4.0 * eta * eta * I * I)}};
            break;
        case Formula::QuantumNarrowbandNear:
        case Formula::QuantumNarrowbandFar:
            res.numerator = t4 * one_u * one_u;
            terms = {{"excess", n / std::sqrt(2.0 * pi)},
                     {"order-1/I", (t2 / eta + 4.0 * pi * r * t4 / (3.0 * eta)) / I},
                     {"order-1/I^2", sqrt_pi * r * x * t2 / (16.0 * sqrt2 * eta * eta * I * I) * one_u}};
            break;
        case Formula::QuantumBroadbandNear: {
            res.numerator = t4 * one_u * one_u;
            const double d1 = 2.0 * t2 / (sqrt3 * eta) + std::sqrt(8.0) * t4 / x + 8.0 * pi * r * t4 / (3.0 * sqrt3 * eta);
            const double g2 = sqrt2 * t4 / x + (pi * r / eta) * (t4 + t2 / (2.0 * eta));
            terms = {{"excess", std::sqrt(8.0) * n / (sqrt_pi * x)},
                     {"order-1/I", d1 / I},
                     {"order-1/I^2", g2 / (2.0 * sqrt_pi * I * I)},
                     {"order-1/I^3", r * t2 / (8.0 * eta * eta * I * I * I)}};
            break;
        }
        case Formula::QuantumBroadbandFar: {
            res.numerator = t4 * one_u * one_u;
            const double g1 = 2.0 * t2 / (sqrt3 * eta) + sqrt2 * t4 / x + 8.0 * pi * r * t4 / (3.0 * sqrt3 * eta);
            const double d2 = sqrt2 * t4 / x + (8.0 * pi * r / (3.0 * eta)) * (t4 + 3.0 * t2 / (4.0 * eta));
            terms = {{"excess", std::sqrt(8.0) * n / (sqrt_pi * x)},
                     {"order-1/I", g1 / I},
                     {"order-1/I^2", d2 / (8.0 * sqrt_pi * I * I)},
                     {"order-1/I^3", r * t2 / (16.0 * eta * eta * I * I * I)}};
            break;
        }
    }
    double denom = 0.0;
    for (const auto& t : terms) denom += t.value;
    res.snr_normalized = res.numerator / denom;
    res.snr = res.snr_normalized * p.averaging_ratio;
    const auto dom = std::max_element(terms.begin(), terms.end(),
                                      [](const NoiseTerm& a, const NoiseTerm& b) { return a.value < b.value; });
    res.dominant_term = dom->label;
    res.asymptotes_normalized = normalized_asymptotes(f, p);
    res.asymptotes = {res.asymptotes_normalized.low_brightness * p.averaging_ratio,
                      res.asymptotes_normalized.high_brightness * p.averaging_ratio};
    add_guard_warnings(f, p, th, res.warnings);
    return res;
}

NormalizedQuery normalize(const SnrQuery& q) {
    q.src.validate();
    q.det.validate_with(q.src);
    q.mask.validate();
    if (!(q.averaging_time > 0.0)) throw ConfigError("correlator.TI", "averaging time must be positive");
    NormalizedQuery out;
    out.field = q.geo.regime;
    out.regime = classify_regime(q.src, q.geo, q.det, q.thresholds);
    if (out.field == FieldRegime::Intermediate)
        throw UnsupportedRegime("no closed form is available at intermediate Fresnel number");
    if (out.regime.field != out.field)
        out.warnings.push_back({"field", "declared " + to_string(out.field) + "-field geometry but the Fresnel numbers classify it as " +
                                             to_string(out.regime.field)});
    const PlaneScales s = plane_scales(q.src, q.geo);
    auto& p = out.params;
    p.brightness = brightness(q.src).value;
    p.bandwidth_product = q.det.omega_B * q.src.coherence_time;
    p.pinhole_ratio = s.coherence_radius * s.coherence_radius / q.det.pinhole_area;
    if (q.cells_override) {
        p.cells = *q.cells_override;
    } else {
        if (!q.mask.has_finite_area())
            throw ConfigError("mask.AT_prime_over_rho0sq", "mask has no finite effective area; supply an override");
        p.cells = q.mask.effective_area() / (s.coherence_radius * s.coherence_radius);
    }
    p.eta = q.det.eta;
    const Vec2 rho1 = q.eval_point.value_or(q.det.pinhole_pos);
    const bool inverted = is_phase_sensitive(q.src.kind) && out.field == FieldRegime::FarField;
    p.transmission = q.mask.transmissivity_at(inverted ? -rho1 : rho1);
    p.averaging_ratio = q.averaging_time / q.src.coherence_time;
    const double need = q.averaging_guard * std::max(q.src.coherence_time, 1.0 / q.det.omega_B);
    if (q.averaging_time < need)
        out.warnings.push_back({"averaging", "T_I is shorter than " + fmt(q.averaging_guard) + " max(T0, 1/Omega_B)"});
    return out;
}

namespace {

SnrResult run(const SnrQuery& q, Formula f) {
    NormalizedQuery nq = normalize(q);
    SnrResult res = evaluate(f, nq.params, q.thresholds);
    res.regime = nq.regime;
    // The averaging guard from the SI path supersedes the normalized one.
    std::erase_if(res.warnings, [](const RegimeWarning& w) { return w.code == "averaging"; });
    res.warnings.insert(res.warnings.begin(), nq.warnings.begin(), nq.warnings.end());
    return res;
}

void require_kind(const SnrQuery& q, bool ok, const char* what) {
    if (!ok) throw ConfigError("source.kind", std::string("source kind ") + to_string(q.src.kind) + " is not valid for " + what);
}

void require_field(const SnrQuery& q, FieldRegime want, const char* what) {
    if (q.geo.regime != want)
        throw UnsupportedRegime(std::string(what) + " requires " + to_string(want) + "-field geometry");
}

}  // namespace

SnrResult snr_thermal_narrowband(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::Thermal ||
                        (q.src.kind == SourceKind::ClassicalPhaseSensitive && q.geo.regime == FieldRegime::NearField),
                 "the thermal narrowband formula");
    return run(q, Formula::ThermalNarrowband);
}

SnrResult snr_thermal_broadband(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::Thermal ||
                        (q.src.kind == SourceKind::ClassicalPhaseSensitive && q.geo.regime == FieldRegime::NearField),
                 "the thermal broadband formula");
    return run(q, Formula::ThermalBroadband);
}

SnrResult snr_classical_ps(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::ClassicalPhaseSensitive, "the classical phase-sensitive formula");
    const BandRegime band = classify_band(q.det.omega_B * q.src.coherence_time, q.thresholds);
    const Formula f = band == BandRegime::Broadband ? Formula::ThermalBroadband : Formula::ThermalNarrowband;
    return run(q, f);
}

SnrResult snr_quantum_narrowband_near(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::QuantumPhaseSensitive, "the quantum formulas");
    require_field(q, FieldRegime::NearField, "snr_quantum_narrowband_near");
    return run(q, Formula::QuantumNarrowbandNear);
}

SnrResult snr_quantum_broadband_near(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::QuantumPhaseSensitive, "the quantum formulas");
    require_field(q, FieldRegime::NearField, "snr_quantum_broadband_near");
    return run(q, Formula::QuantumBroadbandNear);
}

SnrResult snr_quantum_narrowband_far(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::QuantumPhaseSensitive, "the quantum formulas");
    require_field(q, FieldRegime::FarField, "snr_quantum_narrowband_far");
    return run(q, Formula::QuantumNarrowbandFar);
}

SnrResult snr_quantum_broadband_far(const SnrQuery& q) {
    require_kind(q, q.src.kind == SourceKind::QuantumPhaseSensitive, "the quantum formulas");
    require_field(q, FieldRegime::FarField, "snr_quantum_broadband_far");
    return run(q, Formula::QuantumBroadbandFar);
}

SnrResult snr(const SnrQuery& q) {
    const BandRegime band = classify_band(q.det.omega_B * q.src.coherence_time, q.thresholds);
    switch (q.src.kind) {
        case SourceKind::Thermal:
            return band == BandRegime::Broadband ? snr_thermal_broadband(q) : snr_thermal_narrowband(q);
        case SourceKind::ClassicalPhaseSensitive:
            return snr_classical_ps(q);
        case SourceKind::QuantumPhaseSensitive:
            if (q.geo.regime == FieldRegime::FarField)
                return band == BandRegime::Broadband ? snr_quantum_broadband_far(q) : snr_quantum_narrowband_far(q);
            return band == BandRegime::Broadband ? snr_quantum_broadband_near(q) : snr_quantum_narrowband_near(q);
    }
    throw ConfigError("source.kind", "unknown source kind");
}

double BrightnessPolynomial::operator()(double I) const {
    const double u = 1.0 + k / I;
    double d = 0.0;
    double ip = 1.0;
    for (double cj : c) {
        d += cj * ip;
        ip /= I;
    }
    return scale * u * u / d;
}

BrightnessPolynomial brightness_polynomial(Formula f, const NormalizedParams& p) {
    // Read off the coefficients of I^-j from two evaluations of each term at I = 1.
    NormalizedParams unit = p;
    unit.brightness = 1.0;
    const SnrResult at1 = evaluate(f, unit);
    BrightnessPolynomial bp;
    bp.scale = at1.numerator / ((1.0 + pair_coefficient(f)) * (1.0 + pair_coefficient(f)));
    bp.k = pair_coefficient(f);
    for (const auto& t : at1.noise_terms) {
        if (t.label == "excess") {
            bp.c[0] += t.value;
        } else if (t.label == "cross-beat-a" || t.label == "cross-beat-b" || t.label == "order-1/I") {
            bp.c[1] += t.value;
        } else if (t.label == "shot") {
            bp.c[2] += t.value;
        } else if (t.label == "order-1/I^2") {
            if (f == Formula::QuantumNarrowbandNear || f == Formula::QuantumNarrowbandFar) {
                // s (1 + k/I) / I^2 at I = 1 equals s (1 + k).
                const double s = t.value / (1.0 + bp.k);
                bp.c[2] += s;
                bp.c[3] += s * bp.k;
            } else {
                bp.c[2] += t.value;
            }
        } else if (t.label == "order-1/I^3") {
            bp.c[3] += t.value;
        }
    }
    return bp;
}

namespace {

using Poly = std::vector<double>;  // ascending powers

Poly mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly deriv(const Poly& a) {
    Poly r(a.size() > 1 ? a.size() - 1 : 1, 0.0);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = i * a[i];
    return r;
}

double peval(const Poly& a, double x) {
    double v = 0.0;
    for (size_t i = a.size(); i-- > 0;) v = v * x + a[i];
    return v;
}

std::vector<double> positive_real_roots(Poly p) {
    // Work in y = log-scaled variable to tame coefficient spread: I = s y with s chosen from the coefficients.
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
    size_t low = 0;
    while (low + 1 < p.size() && p[low] == 0.0) ++low;
    p.erase(p.begin(), p.begin() + static_cast<long>(low));
    const int deg = static_cast<int>(p.size()) - 1;
    std::vector<double> roots;
    if (deg < 1) return roots;
    const double s = std::pow(std::abs(p[0] / p[deg]), 1.0 / deg);
    Poly q(p.size());
    for (int i = 0; i <= deg; ++i) q[i] = p[i] * std::pow(s, i);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -q[i] / q[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    const auto dp = deriv(p);
    for (int i = 0; i < deg; ++i) {
        const auto z = es.eigenvalues()(i);
        if (z.real() <= 0.0 || std::abs(z.imag()) > 1e-6 * std::abs(z)) continue;
        double x = z.real() * s;
        for (int it = 0; it < 50; ++it) {
            const double d = peval(dp, x);
            if (d == 0.0) break;
            const double step = peval(p, x) / d;
            const double nx = x - step;
            if (!(nx > 0.0)) break;
            x = nx;
            if (std::abs(step) < 1e-15 * x) break;
        }
        roots.push_back(x);
    }
    return roots;
}

}  // namespace

OptimalBrightness optimal_brightness(Formula f, const NormalizedParams& p, double I_min, double I_max,
                                     int grid_points) {
    p.validate();
    const BrightnessPolynomial bp = brightness_polynomial(f, p);
    OptimalBrightness out;

    // Grid scan.
    const double l0 = std::log(I_min), l1 = std::log(I_max);
    int best = 0;
    double best_v = -1.0;
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid[i] = std::exp(l0 + (l1 - l0) * i / (grid_points - 1));
        const double v = bp(grid[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    out.grid_I_opt = grid[best];

    // SNR = scale * I (I + k)^2 / (c0 I^3 + c1 I^2 + c2 I + c3); stationary points solve N'D - ND' = 0.
    const Poly num = mul(mul(Poly{bp.k, 1.0}, Poly{bp.k, 1.0}), Poly{0.0, 1.0});
    const Poly den{bp.c[3], bp.c[2], bp.c[1], bp.c[0]};
    const Poly a = mul(deriv(num), den);
    const Poly b = mul(num, deriv(den));
    Poly stat(std::max(a.size(), b.size()), 0.0);
    for (size_t i = 0; i < a.size(); ++i) stat[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) stat[i] -= b[i];

    double root_best = 0.0, root_v = -1.0;
    for (double r : positive_real_roots(stat)) {
        const double h = 1e-4;
        const double v = bp(r);
        // Keep maxima only.
        if (v >= bp(r * (1.0 + h)) && v >= bp(r * (1.0 - h)) && v > root_v) {
            root_v = v;
            root_best = r;
        }
    }
    const double sat = bp.scale / bp.c[0];
    if (root_v > 0.0 && root_v >= sat) {
        out.I_opt = root_best;
        out.snr_normalized_at_opt = root_v;
        out.from_polynomial = true;
        out.note = "interior maximum from the stationarity polynomial";
    } else if (best > 0 && best < grid_points - 1 && best_v > sat) {
        // Refine the grid maximum by golden-section search in log I.
        double lo = std::log(grid[best - 1]), hi = std::log(grid[best + 1]);
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 100; ++it) {
            const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
            if (bp(std::exp(m1)) < bp(std::exp(m2))) lo = m1; else hi = m2;
        }
        out.I_opt = std::exp(0.5 * (lo + hi));
        out.snr_normalized_at_opt = bp(out.I_opt);
        out.note = "interior maximum from the grid scan";
    } else {
        out.monotone = true;
        out.I_opt = I_max;
        out.snr_normalized_at_opt = sat;
        out.note = "no interior maximum; SNR saturates at " + fmt(sat) + " (per T_I/T0) as brightness grows";
    }
    out.snr_at_opt = out.snr_normalized_at_opt * p.averaging_ratio;
    return out;
}

OptimalBrightness optimal_brightness(const SnrQuery& q) {
    if (q.src.kind != SourceKind::QuantumPhaseSensitive)
        throw ConfigError("source.kind", "optimal brightness is defined for the quantum source");
    const NormalizedQuery nq = normalize(q);
    const Formula f = select_formula(q.src.kind, nq.field, classify_band(nq.params.bandwidth_product, q.thresholds));
    return optimal_brightness(f, nq.params);
}

}  // namespace ghostsnr
