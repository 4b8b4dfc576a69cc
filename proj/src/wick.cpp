#include "ghostsnr/wick.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wick_integrals.hpp"

namespace ghostsnr::wick {

namespace {

using detail::SpaceFactor;
using detail::TimeEdge;

struct Kernels {
    std::vector<GaussianTerm> automatic;
    std::vector<GaussianTerm> cross_pi;
    std::vector<GaussianTerm> cross_ps;
};

Kernels plane_kernels(const PlaneModel& m) {
    Kernels k;
    k.automatic = plane_terms(m, KernelKind::PhaseInsensitiveAuto);
    if (m.kind == SourceKind::Thermal)
        k.cross_pi = plane_terms(m, KernelKind::PhaseInsensitiveCross);
    else if (m.kind == SourceKind::ClassicalPhaseSensitive)
        k.cross_ps = plane_terms(m, KernelKind::PhaseSensitiveCrossClassical);
    else
        k.cross_ps = plane_terms(m, KernelKind::PhaseSensitiveCrossQuantum);
    return k;
}

const std::vector<GaussianTerm>& terms_for(const Kernels& k, PairType t) {
    switch (t) {
        case PairType::PIAuto: return k.automatic;
        case PairType::PICross: return k.cross_pi;
        default: return k.cross_ps;
    }
}

struct Factor {
    int u;
    int v;
    PairType type;
    const std::vector<GaussianTerm>* terms;
};

struct ExpressionSum {
    std::complex<double> value = 0.0;
    double magnitude = 0.0;  // sum of |term|, the scale for the imaginary residue
    double error = 0.0;
    int pairings = 0;
    int killed = 0;
    int unlinked = 0;
};

// Requires a coherence line between the vertices of the two external times; terms without one
// factor into the product of means and are removed by the covariance.
bool linked(const std::vector<Vertex>& verts, const std::vector<Factor>& fs) {
    for (const auto& f : fs) {
        if (f.u == f.v) continue;
        if (verts[f.u].external_times != verts[f.v].external_times) return true;
    }
    return false;
}

bool needs_link(const std::vector<Vertex>& verts) {
    bool t0 = false, t1 = false;
    for (const auto& v : verts) {
        if (v.external_times.size() != 1) return false;
        (v.external_times[0] == 0 ? t0 : t1) = true;
    }
    return t0 && t1;
}

ExpressionSum expression_sum(const PlaneModel& m, const Kernels& k, const MomentExpression& expr,
                             const QuadratureConfig& qc) {
    ExpressionSum out;
    const auto& verts = expr.vertices;
    const bool link_rule = needs_link(verts);
    detail::SpatialSetup setup{&verts, 1, m.pinhole_pos, &m.mask, qc};

    double weight = 1.0;
    for (const auto& v : verts) weight *= v.detector == 1 ? m.eta * m.pinhole_area : m.eta;

    for (const auto& pairing : enumerate_pairings(expr, m.kind)) {
        std::vector<Factor> fs;
        for (size_t i = 0; i < pairing.pairs.size(); ++i) {
            const auto& a = expr.labels[pairing.pairs[i].first];
            const auto& b = expr.labels[pairing.pairs[i].second];
            fs.push_back({a.vertex, b.vertex, pairing.types[i], &terms_for(k, pairing.types[i])});
        }
        if (link_rule && !linked(verts, fs)) {
            ++out.unlinked;
            continue;
        }
        ++out.pairings;

        std::vector<size_t> choice(fs.size(), 0);
        for (;;) {
            std::complex<double> amp = 1.0;
            std::vector<TimeEdge> edges;
            std::vector<SpaceFactor> space;
            for (size_t i = 0; i < fs.size(); ++i) {
                const GaussianTerm& t = (*fs[i].terms)[choice[i]];
                amp *= fs[i].type == PairType::PSCrossConj ? std::conj(t.amplitude) : t.amplitude;
                space.push_back({fs[i].u, fs[i].v, t.envelope_radius, t.coherence_radius, t.inverted});
                if (fs[i].u != fs[i].v) edges.push_back({fs[i].u, fs[i].v, t.coherence_time});
            }
            const auto tv = detail::temporal_factor(verts, edges, m.bandwidth_product, m.notch_product);
            if (!tv) {
                throw std::logic_error("moment term with a free time integral survived the covariance subtraction");
            } else if (*tv == 0.0) {
                ++out.killed;
            } else {
                const auto sv = detail::spatial_factor(setup, space);
                const std::complex<double> term = amp * (*tv * sv.value * weight);
                out.value += term;
                out.magnitude += std::abs(term);
                out.error += std::abs(amp) * std::abs(*tv) * sv.error * weight;
            }
            size_t i = 0;
            while (i < fs.size() && ++choice[i] == fs[i].terms->size()) choice[i++] = 0;
            if (i == fs.size()) break;
        }
    }
    return out;
}

std::string class_of(int deltas) {
    switch (deltas) {
        case 0: return "excess x excess";
        case 1: return "excess x shot";
        default: return "shot x shot";
    }
}

double residue(const ExpressionSum& s) {
    return s.magnitude > 0.0 ? std::abs(s.value.imag()) / s.magnitude : 0.0;
}

void check_pinhole(const PlaneModel& m) {
    if (m.pinhole_area > 0.2 * std::numbers::pi)
        throw ConfigError("detector.A1", "pinhole approximation needs A1 <= 0.2 pi rho^2 in the detection plane");
}

void check_averaging(const PlaneModel& m, double averaging_ratio) {
    const double need = 100.0 * std::max(1.0, 1.0 / m.bandwidth_product);
    if (!(averaging_ratio >= need))
        throw ConfigError("T_I", "averaging time must be at least 100 max(T0, 1/omegaB)");
}

constexpr double kResidueTol = 1e-10;

}  // namespace

MeanDetail mean_detail(const PlaneModel& m, const QuadratureConfig& qc) {
    m.validate();
    check_pinhole(m);
    const Kernels k = plane_kernels(m);
    const auto exprs = normal_order({{1, 0}, {2, 0}});
    MeanDetail out;
    LedgerEntry background{"background", 0, 0, 0, 0.0, 0.0};
    for (const auto& e : exprs) {
        const auto s = expression_sum(m, k, e, qc);
        out.mean += s.value.real();
        out.quadrature_error_estimate += s.error;
        out.imag_residue = std::max(out.imag_residue, residue(s));
        out.term_ledger.push_back({"excess", static_cast<int>(e.commutator_deltas.size()), s.pairings, s.killed,
                                   s.value.real(), residue(s)});
        background.killed_by_ac += s.killed;
    }
    out.term_ledger.push_back(background);
    return out;
}

double mean_C(const PlaneModel& m, const QuadratureConfig& qc) {
    return mean_detail(m, qc).mean;
}

OracleResult variance_C(const PlaneModel& m, double averaging_ratio, const QuadratureConfig& qc) {
    check_averaging(m, averaging_ratio);
    const MeanDetail md = mean_detail(m, qc);
    const Kernels k = plane_kernels(m);
    OracleResult out;
    out.mean = md.mean;

    double total = 0.0;
    double worst_residue = md.imag_residue;
    LedgerEntry background{"background", 0, 0, 0, 0.0, 0.0};
    LedgerEntry disconnected{"disconnected", 0, 0, 0, 0.0, 0.0};
    for (const auto& e : photocurrent_fourth_moment()) {
        const auto s = expression_sum(m, k, e, qc);
        const int deltas = static_cast<int>(e.commutator_deltas.size());
        total += s.value.real();
        out.quadrature_error_estimate += s.error / averaging_ratio;
        worst_residue = std::max(worst_residue, residue(s));
        out.term_ledger.push_back(
            {class_of(deltas), deltas, s.pairings, s.killed, s.value.real() / averaging_ratio, residue(s)});
        background.killed_by_ac += s.killed;
        disconnected.pairings += s.unlinked;
    }
    out.term_ledger.push_back(background);
    out.term_ledger.push_back(disconnected);
    if (worst_residue > kResidueTol)
        out.warnings.push_back("imaginary residue " + std::to_string(worst_residue) + " exceeds 1e-10 relative");

    double var = total / averaging_ratio;
    if (var < 0.0) {
        if (var < -1e-9 * out.mean * out.mean)
            throw NonConvergence("oracle variance is negative beyond quadrature tolerance: " + std::to_string(var));
        out.warnings.push_back("negative variance within quadrature tolerance clamped to 0");
        var = 0.0;
    }
    out.variance = var;
    out.snr = var > 0.0 ? out.mean * out.mean / var : std::numeric_limits<double>::infinity();
    return out;
}

double mean_C(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo, const MaskSpec& mask,
              const QuadratureConfig& qc) {
    const PlaneModel m = make_plane_model(src, det, geo, mask);
    const double q = det.electron_charge;
    return q * q * mean_C(m, qc) / (src.coherence_time * src.coherence_time);
}

OracleResult variance_C(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo,
                        const MaskSpec& mask, double averaging_time, const QuadratureConfig& qc) {
    const PlaneModel m = make_plane_model(src, det, geo, mask);
    if (!(averaging_time > 0.0)) throw ConfigError("T_I", "must be positive");
    OracleResult r = variance_C(m, averaging_time / src.coherence_time, qc);
    const double q2 = det.electron_charge * det.electron_charge;
    const double t2 = src.coherence_time * src.coherence_time;
    r.mean *= q2 / t2;
    r.variance *= q2 * q2 / (t2 * t2);
    r.quadrature_error_estimate *= q2 * q2 / (t2 * t2);
    for (auto& e : r.term_ledger) e.value *= q2 * q2 / (t2 * t2);
    return r;
}

std::vector<NotchPoint> notch_sensitivity(const PlaneModel& m, double averaging_ratio,
                                          const std::vector<double>& notch_products, const QuadratureConfig& qc) {
    std::vector<NotchPoint> out;
    for (double xn : notch_products) {
        PlaneModel mm = m;
        mm.notch_product = xn;
        const double snr = variance_C(mm, averaging_ratio, qc).snr;
        const double ref = out.empty() ? snr : out.front().snr;
        out.push_back({xn, snr, (snr - ref) / ref});
    }
    return out;
}

}  // namespace ghostsnr::wick
