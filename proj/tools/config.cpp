#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace ghostsnr::cli {

using nlohmann::json;

namespace {

const json& block(const json& cfg, const char* name) {
    static const json empty = json::object();
    if (!cfg.contains(name)) return empty;
    const json& b = cfg.at(name);
    if (!b.is_object()) throw ConfigError(name, "must be an object");
    return b;
}

std::optional<double> number(const json& b, const std::string& blk, const std::string& key) {
    if (!b.contains(key) || b.at(key).is_null()) return std::nullopt;
    const json& v = b.at(key);
    if (!v.is_number()) throw ConfigError(blk + "." + key, "must be a number");
    return v.get<double>();
}

double required(const json& b, const std::string& blk, const std::string& key) {
    auto v = number(b, blk, key);
    if (!v) throw ConfigError(blk + "." + key, "missing required value");
    return *v;
}

// Exactly one of an aliased pair; returns which was given (0 or 1) and its value.
std::optional<std::pair<int, double>> alias(const json& b, const std::string& blk, const std::string& a,
                                            const std::string& c, bool needed) {
    const auto va = number(b, blk, a);
    const auto vc = number(b, blk, c);
    if (va && vc) throw ConfigError(blk + "." + a, "give either " + blk + "." + a + " or " + blk + "." + c + ", not both");
    if (va) return std::make_pair(0, *va);
    if (vc) return std::make_pair(1, *vc);
    if (needed) throw ConfigError(blk + "." + a, "missing required value (or its alias " + blk + "." + c + ")");
    return std::nullopt;
}

Vec2 point(const json& b, const std::string& blk, const std::string& key) {
    if (!b.contains(key)) return {};
    const json& v = b.at(key);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(blk + "." + key, "must be a two-element array");
}

FieldRegime parse_regime(const std::string& s) {
    if (s == "near" || s == "near-field") return FieldRegime::NearField;
    if (s == "far" || s == "far-field") return FieldRegime::FarField;
    throw ConfigError("geometry.regime", "expected \"near\" or \"far\", got \"" + s + "\"");
}

std::optional<MaskSpec> parse_mask(const json& m, double unit) {
    if (!m.contains("shape")) return std::nullopt;
    const std::string shape = m.at("shape").get<std::string>();
    const Vec2 c = (1.0 / unit) * point(m, "mask", "center");
    if (shape == "disk") return MaskSpec::disk(required(m, "mask", "size") / unit, c);
    if (shape == "gaussian" || shape == "gaussian-spot") return MaskSpec::gaussian_spot(required(m, "mask", "size") / unit, c);
    if (shape == "uniform") return MaskSpec::uniform(number(m, "mask", "value").value_or(1.0));
    throw ConfigError("mask.shape", "expected disk, gaussian or uniform, got \"" + shape + "\"");
}

Resolved resolve_physical(const json& cfg, Resolved r) {
    const json& s = block(cfg, "source");
    const json& g = block(cfg, "geometry");
    const json& d = block(cfg, "detector");
    const json& m = block(cfg, "mask");
    const json& c = block(cfg, "correlator");

    SnrQuery q;
    q.src.kind = r.kind;
    q.src.photon_flux = required(s, "source", "P");
    q.src.beam_radius = required(s, "source", "a0");
    q.src.coherence_radius = required(s, "source", "rho0");
    q.src.coherence_time = required(s, "source", "T0");
    const auto k = alias(s, "source", "k0", "wavelength", true);
    q.src.wave_number = k->first == 0 ? k->second : 2.0 * std::numbers::pi / k->second;
    q.src.validate();

    q.geo.path_length = required(g, "geometry", "L");
    q.det.eta = required(d, "detector", "eta");
    const auto ob = alias(d, "detector", "omegaB", "omegaB_T0", true);
    q.det.omega_B = ob->first == 0 ? ob->second : ob->second / q.src.coherence_time;
    const auto on = alias(d, "detector", "omegaN", "omegaN_T0", false);
    if (on) q.det.omega_N = on->first == 0 ? on->second : on->second / q.src.coherence_time;
    q.det.pinhole_pos = point(d, "detector", "rho1");
    if (auto e = number(d, "detector", "q")) q.det.electron_charge = *e;

    const RegimeReport report = classify_regime(q.src, {q.geo.path_length, FieldRegime::NearField}, q.det);
    if (g.contains("regime")) {
        q.geo.regime = parse_regime(g.at("regime").get<std::string>());
    } else {
        q.geo.regime = report.field;
        if (q.geo.regime == FieldRegime::Intermediate)
            throw UnsupportedRegime("the Fresnel numbers put this geometry between the near and far fields");
    }
    const double rho_plane = plane_scales(q.src, q.geo).coherence_radius;
    const auto a1 = alias(d, "detector", "A1", "rho0sq_over_A1", true);
    q.det.pinhole_area = a1->first == 0 ? a1->second : rho_plane * rho_plane / a1->second;

    auto mask = parse_mask(m, 1.0);
    const auto cells = number(m, "mask", "AT_prime_over_rho0sq");
    if (!mask) throw ConfigError("mask.shape", "missing required value");
    q.mask = *mask;
    if (cells) q.cells_override = *cells;
    const auto ti = alias(c, "correlator", "TI", "TI_over_T0", true);
    q.averaging_time = ti->first == 0 ? ti->second : ti->second * q.src.coherence_time;

    const NormalizedQuery nq = normalize(q);
    r.field = nq.field;
    r.params = nq.params;
    r.regime = nq.regime;
    r.warnings = nq.warnings;
    r.band = classify_band(r.params.bandwidth_product);
    r.coherence_time = q.src.coherence_time;
    r.plane = make_plane_model(q.src, q.det, q.geo, q.mask);
    r.physical = q;
    return r;
}

Resolved resolve_normalized(const json& cfg, Resolved r) {
    const json& s = block(cfg, "source");
    const json& g = block(cfg, "geometry");
    const json& d = block(cfg, "detector");
    const json& m = block(cfg, "mask");
    const json& c = block(cfg, "correlator");

    // Lengths may be given in metres with source.rho0, times in seconds with source.T0.
    const double rho0 = number(s, "source", "rho0").value_or(1.0);
    const double T0 = number(s, "source", "T0").value_or(1.0);
    NormalizedParams& p = r.params;
    p.brightness = required(s, "source", "I");
    r.field = g.contains("regime") ? parse_regime(g.at("regime").get<std::string>()) : FieldRegime::NearField;

    p.eta = required(d, "detector", "eta");
    const auto ob = alias(d, "detector", "omegaB", "omegaB_T0", true);
    p.bandwidth_product = ob->first == 0 ? ob->second * T0 : ob->second;
    const auto on = alias(d, "detector", "omegaN", "omegaN_T0", false);
    const double notch = on ? (on->first == 0 ? on->second * T0 : on->second) : 0.0;
    const auto a1 = alias(d, "detector", "A1", "rho0sq_over_A1", true);
    p.pinhole_ratio = a1->first == 0 ? rho0 * rho0 / a1->second : a1->second;
    const Vec2 rho1 = (1.0 / rho0) * point(d, "detector", "rho1");

    const auto mask = parse_mask(m, rho0);
    const auto cells = number(m, "mask", "AT_prime_over_rho0sq");
    const auto trans = number(m, "mask", "transmission");
    const bool mirrored = is_phase_sensitive(r.kind) && r.field == FieldRegime::FarField;
    MaskSpec plane_mask = MaskSpec::gaussian_spot(1.0);
    Vec2 pinhole = rho1;
    if (mask) {
        if (trans) throw ConfigError("mask.transmission", "only valid without mask.shape");
        plane_mask = *mask;
        if (cells) {
            p.cells = *cells;
        } else {
            if (!mask->has_finite_area())
                throw ConfigError("mask.AT_prime_over_rho0sq", "mask has no finite effective area; supply an override");
            p.cells = mask->effective_area();
        }
        p.transmission = mask->transmissivity_at(mirrored ? -rho1 : rho1);
    } else {
        if (!cells) throw ConfigError("mask.AT_prime_over_rho0sq", "missing required value (or mask.shape)");
        p.cells = *cells;
        p.transmission = trans.value_or(1.0);
        // Gaussian spot with the same A'_T; the pinhole sits where |T| has the requested value.
        const double w = std::sqrt(4.0 * p.cells / std::numbers::pi);
        plane_mask = MaskSpec::gaussian_spot(w);
        const double tau = p.transmission;
        const double offset = tau > 0.0 ? w * std::sqrt(std::max(0.0, -std::log(tau))) : 10.0 * w;
        pinhole = {mirrored ? -offset : offset, 0.0};
        r.warnings.push_back({"mask", "no mask shape given; oracle and simulator use a Gaussian spot with the same A'_T"});
    }

    const auto ti = alias(c, "correlator", "TI", "TI_over_T0", true);
    p.averaging_ratio = ti->first == 0 ? ti->second / T0 : ti->second;
    p.validate();
    r.band = classify_band(p.bandwidth_product);

    PlaneModel& pm = r.plane;
    pm.kind = r.kind;
    pm.field = r.field;
    pm.brightness = p.brightness;
    pm.bandwidth_product = p.bandwidth_product;
    pm.notch_product = notch;
    pm.pinhole_area = 1.0 / p.pinhole_ratio;
    pm.eta = p.eta;
    pm.pinhole_pos = pinhole;
    pm.mask = plane_mask;
    const auto env = number(s, "source", "a0_over_rho0");
    pm.envelope_radius = env ? *env : default_envelope(plane_mask, pinhole);
    return r;
}

}  // namespace

double default_envelope(const MaskSpec& mask, Vec2 pinhole) {
    double extent = 0.0;
    switch (mask.shape()) {
        case MaskSpec::Shape::Disk:
        case MaskSpec::Shape::GaussianSpot:
            extent = mask.size() + std::sqrt(norm2(mask.center()));
            break;
        case MaskSpec::Shape::Uniform: extent = 10.0; break;
    }
    extent = std::max(extent, std::sqrt(norm2(pinhole)));
    return std::max(100.0, 10.0 * extent);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
}

Resolved resolve(const json& cfg) {
    if (!cfg.is_object()) throw ConfigError("config", "top level must be an object");
    Resolved r;
    const json& s = block(cfg, "source");
    if (!s.contains("kind")) throw ConfigError("source.kind", "missing required value");
    try {
        r.kind = parse_source_kind(s.at("kind").get<std::string>());
    } catch (const json::exception&) {
        throw ConfigError("source.kind", "must be a string");
    }

    const json& sw = block(cfg, "sweep");
    if (!sw.empty()) {
        SweepSpec sp;
        if (sw.contains("variable")) sp.variable = sw.at("variable").get<std::string>();
        sp.from = number(sw, "sweep", "from").value_or(sp.from);
        sp.to = number(sw, "sweep", "to").value_or(sp.to);
        sp.points = static_cast<int>(number(sw, "sweep", "points").value_or(sp.points));
        if (!(sp.from > 0.0 && sp.to > sp.from)) throw ConfigError("sweep.from", "need 0 < from < to");
        if (sp.points < 2) throw ConfigError("sweep.points", "need at least 2 points");
        r.sweep = sp;
    }
    const json& out = block(cfg, "output");
    if (out.contains("csv")) r.csv = out.at("csv").get<std::string>();
    if (out.contains("svg")) r.svg = out.at("svg").get<std::string>();
    const json& v = block(cfg, "validate");
    if (auto x = number(v, "validate", "seed")) r.seed = static_cast<std::uint64_t>(*x);
    if (auto x = number(v, "validate", "trials")) r.trials = static_cast<int>(*x);
    if (auto x = number(v, "validate", "tolerance")) r.tolerance = *x;
    if (cfg.contains("figure")) r.figure = cfg.at("figure");

    const bool physical = s.contains("P");
    if (physical && s.contains("I")) throw ConfigError("source.P", "give either source.P or source.I, not both");
    if (!physical && !s.contains("I")) throw ConfigError("source.I", "missing required value (or its alias source.P)");
    try {
        return physical ? resolve_physical(cfg, std::move(r)) : resolve_normalized(cfg, std::move(r));
    } catch (const json::exception& e) {
        throw ConfigError("config", e.what());
    }
}

Resolved load_config(const std::string& path) {
    return resolve(load_json(path));
}

}  // namespace ghostsnr::cli
