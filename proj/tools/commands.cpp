#include "commands.hpp"

#include <cmath>
#include <ostream>

#include "config.hpp"
#include "ghostsnr/acquisition.hpp"
#include "ghostsnr/analytic.hpp"
#include "ghostsnr/mc.hpp"
#include "ghostsnr/wick.hpp"

namespace ghostsnr::cli {

using nlohmann::json;

namespace {

Resolved load(const Options& o) {
    if (!o.config) throw ConfigError("config", "--config <path> is required");
    Resolved r = load_config(*o.config);
    if (o.seed) r.seed = o.seed;
    if (o.trials) r.trials = o.trials;
    if (o.tolerance) r.tolerance = o.tolerance;
    if (o.csv) r.csv = o.csv;
    if (o.svg) r.svg = o.svg;
    return r;
}

Formula formula_for(const Resolved& r) {
    return select_formula(r.kind, r.field, r.band);
}

SnrResult analytic(const Resolved& r) {
    if (r.physical) return snr(*r.physical);
    SnrResult res = evaluate(formula_for(r), r.params);
    res.warnings.insert(res.warnings.begin(), r.warnings.begin(), r.warnings.end());
    return res;
}

json warnings_json(const std::vector<RegimeWarning>& ws) {
    json a = json::array();
    for (const auto& w : ws) a.push_back({{"code", w.code}, {"message", w.message}});
    return a;
}

json params_json(const NormalizedParams& p) {
    return {{"I", p.brightness},          {"omegaB_T0", p.bandwidth_product},
            {"rho0sq_over_A1", p.pinhole_ratio}, {"AT_prime_over_rho0sq", p.cells},
            {"eta", p.eta},               {"transmission", p.transmission},
            {"TI_over_T0", p.averaging_ratio}};
}

json result_json(const SnrResult& r) {
    json terms = json::array();
    for (const auto& t : r.noise_terms) terms.push_back({{"label", t.label}, {"value", t.value}});
    return {{"formula", to_string(r.formula)},
            {"snr", r.snr},
            {"snr_normalized", r.snr_normalized},
            {"numerator", r.numerator},
            {"noise_terms", terms},
            {"dominant_term", r.dominant_term},
            {"asymptotes", {{"low", r.asymptotes.low_brightness}, {"high", r.asymptotes.high_brightness}}},
            {"asymptotes_normalized",
             {{"low", r.asymptotes_normalized.low_brightness}, {"high", r.asymptotes_normalized.high_brightness}}},
            {"warnings", warnings_json(r.warnings)}};
}

void print_warnings(std::ostream& out, const std::vector<RegimeWarning>& ws) {
    for (const auto& w : ws) out << "warning [" << w.code << "]: " << w.message << "\n";
}

double& sweep_target(NormalizedParams& p, const std::string& var) {
    if (var == "I") return p.brightness;
    if (var == "omegaB_T0") return p.bandwidth_product;
    if (var == "rho0sq_over_A1") return p.pinhole_ratio;
    if (var == "AT_prime_over_rho0sq") return p.cells;
    if (var == "eta") return p.eta;
    if (var == "transmission") return p.transmission;
    if (var == "TI_over_T0") return p.averaging_ratio;
    throw ConfigError("sweep.variable", "unknown sweep variable \"" + var + "\"");
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    const double la = std::log10(a), lb = std::log10(b);
    for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, la + (lb - la) * i / (n - 1));
    return v;
}

Table snr_table(const Resolved& r, const std::vector<NormalizedParams>& points) {
    Table t;
    t.header = {"I", "omegaB_T0", "rho0sq_over_A1", "AT_prime_over_rho0sq", "eta", "transmission", "TI_over_T0", "snr",
                "snr_normalized"};
    bool first = true;
    for (const auto& p : points) {
        const SnrResult res = evaluate(formula_for(r), p);
        if (first) {
            for (const auto& n : res.noise_terms) t.header.push_back("noise_" + n.label);
            t.header.push_back("low_asymptote");
            t.header.push_back("high_asymptote");
            first = false;
        }
        std::vector<double> row{p.brightness, p.bandwidth_product, p.pinhole_ratio, p.cells, p.eta, p.transmission,
                                p.averaging_ratio, res.snr, res.snr_normalized};
        for (const auto& n : res.noise_terms) row.push_back(n.value);
        row.push_back(res.asymptotes_normalized.low_brightness);
        row.push_back(res.asymptotes_normalized.high_brightness);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

int cmd_snr(const Options& o, std::ostream& out) {
    const Resolved r = load(o);
    const SnrResult res = analytic(r);
    const bool quantum = r.kind == SourceKind::QuantumPhaseSensitive;
    std::optional<OptimalBrightness> opt;
    if (quantum) opt = optimal_brightness(res.formula, r.params);

    std::vector<NormalizedParams> points{r.params};
    if (r.sweep) {
        points.clear();
        for (double v : logspace(r.sweep->from, r.sweep->to, r.sweep->points)) {
            NormalizedParams p = r.params;
            sweep_target(p, r.sweep->variable) = v;
            points.push_back(p);
        }
    }
    if (r.csv) write_file(*r.csv, to_csv(snr_table(r, points)));

    if (o.json) {
        json j = result_json(res);
        j["source_kind"] = to_string(r.kind);
        j["field"] = to_string(r.field);
        j["band"] = to_string(r.band);
        j["parameters"] = params_json(r.params);
        if (opt)
            j["optimal_brightness"] = {{"I_opt", opt->I_opt},
                                       {"snr_normalized", opt->snr_normalized_at_opt},
                                       {"snr", opt->snr_at_opt},
                                       {"monotone", opt->monotone}};
        if (r.sweep) {
            json rows = json::array();
            for (NormalizedParams p : points) {
                const SnrResult s = evaluate(res.formula, p);
                rows.push_back({{r.sweep->variable, sweep_target(p, r.sweep->variable)},
                                {"snr", s.snr},
                                {"snr_normalized", s.snr_normalized}});
            }
            j["sweep"] = rows;
        }
        out << j.dump(2) << "\n";
        return kOk;
    }
    out << "formula:         " << to_string(res.formula) << " (" << to_string(r.kind) << ", " << to_string(r.field)
        << " field, " << to_string(r.band) << ")\n";
    out << "SNR:             " << format_number(res.snr) << "\n";
    out << "SNR * T0/T_I:    " << format_number(res.snr_normalized) << "\n";
    out << "noise terms (normalized denominator):\n";
    for (const auto& t : res.noise_terms)
        out << "  " << t.label << (t.label == res.dominant_term ? " *" : "") << ": " << format_number(t.value) << "\n";
    out << "asymptotes (SNR * T0/T_I): low " << format_number(res.asymptotes_normalized.low_brightness) << ", high "
        << format_number(res.asymptotes_normalized.high_brightness) << "\n";
    if (opt)
        out << "optimal brightness: I = " << format_number(opt->I_opt) << " (SNR * T0/T_I = "
            << format_number(opt->snr_normalized_at_opt) << (opt->monotone ? ", monotone" : "") << ")\n";
    print_warnings(out, res.warnings);
    return kOk;
}

Figure make_figure(const std::string& name, const json& overrides) {
    Formula f;
    std::string title;
    bool narrow = name.size() == 2 && name[1] == 'a';
    if (name == "2a" || name == "2b") {
        f = narrow ? Formula::ThermalNarrowband : Formula::ThermalBroadband;
        title = std::string("Classical source, ") + (narrow ? "narrowband" : "broadband");
    } else if (name == "3a" || name == "3b") {
        f = narrow ? Formula::QuantumNarrowbandNear : Formula::QuantumBroadbandNear;
        title = std::string("Quantum source, near field, ") + (narrow ? "narrowband" : "broadband");
    } else if (name == "4a" || name == "4b") {
        f = narrow ? Formula::QuantumNarrowbandFar : Formula::QuantumBroadbandFar;
        title = std::string("Quantum source, far field, ") + (narrow ? "narrowband" : "broadband");
    } else {
        throw ConfigError("figure", "unknown figure \"" + name + "\"; expected 2a, 2b, 3a, 3b, 4a or 4b");
    }

    NormalizedParams p;
    p.transmission = 1.0;
    p.cells = 1e4;
    p.pinhole_ratio = 10.0;
    p.eta = 0.9;
    p.averaging_ratio = 1.0;
    std::vector<double> xs = narrow ? std::vector<double>{10.0, 100.0, 1000.0} : std::vector<double>{0.1, 0.01, 0.001};
    double from = 1e-8, to = 1e8;
    int points = 200;
    if (overrides.is_object()) {
        auto get = [&](const char* key, double& dst) {
            if (overrides.contains(key)) dst = overrides.at(key).get<double>();
        };
        get("eta", p.eta);
        get("rho0sq_over_A1", p.pinhole_ratio);
        get("AT_prime_over_rho0sq", p.cells);
        get("transmission", p.transmission);
        get("from", from);
        get("to", to);
        if (overrides.contains("points")) points = overrides.at("points").get<int>();
        if (overrides.contains("omegaB_T0")) xs = overrides.at("omegaB_T0").get<std::vector<double>>();
    }
    if (xs.empty()) throw ConfigError("figure.omegaB_T0", "needs at least one value");
    if (points < 2 || !(from > 0.0 && to > from)) throw ConfigError("figure.points", "need 0 < from < to and points >= 2");

    Figure fig{name, title, xs, {}};
    fig.table.header.push_back("brightness");
    for (double x : xs) fig.table.header.push_back("snr_normalized_omegaB_T0=" + format_number(x));
    fig.table.header.push_back("low_asymptote");
    fig.table.header.push_back("high_asymptote");
    for (double I : logspace(from, to, points)) {
        std::vector<double> row{I};
        for (double x : xs) {
            NormalizedParams q = p;
            q.brightness = I;
            q.bandwidth_product = x;
            row.push_back(brightness_polynomial(f, q)(I));
        }
        NormalizedParams q = p;
        q.brightness = I;
        q.bandwidth_product = xs.front();
        const Asymptotes a = normalized_asymptotes(f, q);
        row.push_back(a.low_brightness);
        row.push_back(a.high_brightness);
        fig.table.rows.push_back(std::move(row));
    }
    return fig;
}

std::vector<FigureCheck> check_figure(const Figure& f) {
    std::vector<FigureCheck> out;
    const auto& rows = f.table.rows;
    const size_t ncol = f.bandwidth_products.size();
    const bool classical = f.name[0] == '2';
    const bool broadband = f.name[1] == 'b';
    for (size_t c = 0; c < ncol; ++c) {
        const std::string col = f.table.header[c + 1];
        size_t imax = 0;
        bool monotone = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i][c + 1] > rows[imax][c + 1]) imax = i;
            if (i && rows[i][c + 1] < rows[i - 1][c + 1] * (1.0 - 1e-12)) monotone = false;
        }
        if (classical) out.push_back({"monotone " + col, monotone, monotone ? "nondecreasing" : "decreases somewhere"});
        if (!classical && broadband && f.bandwidth_products[c] <= 1e-2 + 1e-15) {
            const bool interior = imax > 0 && imax + 1 < rows.size() && rows[imax][c + 1] > rows.back()[c + 1];
            out.push_back({"interior maximum " + col, interior, "maximum at I = " + format_number(rows[imax][0])});
        }
    }
    const double low = rows.front()[ncol + 1], high = rows.back()[ncol + 2];
    const double lo_err = std::abs(rows.front()[1] / low - 1.0);
    const double hi_err = std::abs(rows.back()[1] / high - 1.0);
    out.push_back({"low asymptote", lo_err <= 0.02, "relative gap " + format_number(lo_err)});
    out.push_back({"high asymptote", hi_err <= 0.02, "relative gap " + format_number(hi_err)});
    return out;
}

int cmd_figure(const Options& o, std::ostream& out) {
    json overrides;
    if (o.config) {
        const json cfg = load_json(*o.config);
        if (cfg.contains("figure")) overrides = cfg.at("figure");
    }
    const Figure f = make_figure(o.figure, overrides);
    const std::string csv = to_csv(f.table);
    if (o.csv) write_file(*o.csv, csv);
    if (o.svg) {
        std::vector<Series> series;
        for (size_t c = 0; c < f.table.header.size() - 1; ++c) {
            Series s{f.table.header[c + 1], {}, {}};
            for (const auto& row : f.table.rows) {
                s.x.push_back(row[0]);
                s.y.push_back(row[c + 1]);
            }
            series.push_back(std::move(s));
        }
        write_file(*o.svg, svg_loglog(f.title, "brightness I", "SNR * T0 / T_I", series));
    }
    const auto checks = check_figure(f);
    if (o.json) {
        json j = {{"figure", f.name}, {"title", f.title}, {"omegaB_T0", f.bandwidth_products},
                  {"columns", f.table.header}, {"rows", f.table.rows}};
        json c = json::array();
        for (const auto& k : checks) c.push_back({{"property", k.property}, {"ok", k.ok}, {"detail", k.detail}});
        j["checks"] = c;
        out << j.dump(2) << "\n";
    } else if (!o.csv) {
        out << csv;
    } else {
        out << "figure " << f.name << ": " << f.table.rows.size() << " rows written to " << *o.csv << "\n";
        for (const auto& k : checks) out << (k.ok ? "ok   " : "FAIL ") << k.property << ": " << k.detail << "\n";
    }
    return kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
    if (o.oracle == o.mc) throw ConfigError("validate", "choose exactly one of --oracle or --mc");
    const Resolved r = load(o);
    const SnrResult a = analytic(r);
    const double ratio = r.params.averaging_ratio;
    json j = {{"analytic_snr", a.snr}, {"formula", to_string(a.formula)}};
    Table t;
    bool pass = false;

    if (o.oracle) {
        const double tol = r.tolerance.value_or(0.15);
        const auto res = wick::variance_C(r.plane, ratio);
        const double rel = res.snr / a.snr - 1.0;
        pass = std::abs(rel) <= tol;
        j.update({{"backend", "oracle"}, {"oracle_snr", res.snr}, {"oracle_mean", res.mean},
                  {"oracle_variance", res.variance}, {"relative_difference", rel}, {"tolerance", tol}, {"pass", pass}});
        json ledger = json::array();
        for (const auto& e : res.term_ledger)
            ledger.push_back({{"class", e.term_class}, {"deltas", e.deltas}, {"pairings", e.pairings},
                              {"killed_by_ac", e.killed_by_ac}, {"value", e.value}});
        j["term_ledger"] = ledger;
        t.header = {"analytic_snr", "oracle_snr", "relative_difference", "tolerance", "pass"};
        t.rows.push_back({a.snr, res.snr, rel, tol, pass ? 1.0 : 0.0});
        if (!o.json) {
            out << "analytic SNR (" << to_string(a.formula) << "): " << format_number(a.snr) << "\n";
            out << "oracle SNR:   " << format_number(res.snr) << "  (mean " << format_number(res.mean) << ", variance "
                << format_number(res.variance) << ")\n";
            for (const auto& e : res.term_ledger)
                out << "  " << e.term_class << ": pairings " << e.pairings << ", AC-killed " << e.killed_by_ac
                    << ", value " << format_number(e.value) << "\n";
            for (const auto& w : res.warnings) out << "warning [oracle]: " << w << "\n";
            out << "relative difference " << format_number(rel) << " (tolerance " << format_number(tol) << "): "
                << (pass ? "PASS" : "FAIL") << "\n";
        }
    } else {
        if (r.kind == SourceKind::QuantumPhaseSensitive)
            throw UnsupportedState("no proper P representation; use --oracle");
        const int trials = r.trials.value_or(1000);
        const std::uint64_t seed = r.seed.value_or(1);
        const double zmax = r.tolerance.value_or(3.0);
        const auto oracle = wick::variance_C(r.plane, ratio);
        const auto est = mc::estimate_snr(r.plane, ratio, trials, seed);
        const double z = (est.snr_hat - oracle.snr) / est.std_error;
        pass = std::abs(z) <= zmax;
        j.update({{"backend", "mc"}, {"oracle_snr", oracle.snr}, {"mc_snr", est.snr_hat}, {"mc_stderr", est.std_error},
                  {"z", z}, {"trials", trials}, {"seed", seed}, {"modes", est.modes}, {"inconclusive", est.inconclusive},
                  {"mc_mean", est.mean_C}, {"oracle_mean", oracle.mean}, {"z_limit", zmax}, {"pass", pass},
                  {"warnings", est.warnings}});
        t.header = {"analytic_snr", "oracle_snr", "mc_snr", "mc_stderr", "z", "trials", "seed", "pass"};
        t.rows.push_back({a.snr, oracle.snr, est.snr_hat, est.std_error, z, static_cast<double>(trials),
                          static_cast<double>(seed), pass ? 1.0 : 0.0});
        if (!o.json) {
            out << "analytic SNR (" << to_string(a.formula) << "): " << format_number(a.snr) << "\n";
            out << "oracle SNR:   " << format_number(oracle.snr) << "\n";
            out << "MC SNR:       " << format_number(est.snr_hat) << " +/- " << format_number(est.std_error) << " ("
                << trials << " trials, seed " << seed << ", " << est.modes << " modes)\n";
            out << "MC mean C:    " << format_number(est.mean_C) << " +/- " << format_number(est.mean_stderr)
                << " (oracle " << format_number(oracle.mean) << ")\n";
            for (const auto& w : est.warnings) out << "warning [mc]: " << w << "\n";
            out << "z-score vs oracle " << format_number(z) << " (limit " << format_number(zmax) << "): "
                << (pass ? "PASS" : "FAIL") << "\n";
        }
    }
    if (r.csv) write_file(*r.csv, to_csv(t));
    if (o.json) {
        j["warnings_analytic"] = warnings_json(a.warnings);
        out << j.dump(2) << "\n";
    }
    return pass ? kOk : kValidationFailure;
}

int cmd_acquisition(const Options& o, std::ostream& out) {
    if (!o.config) throw ConfigError("config", "--config <path> is required");
    const json cfg = load_json(*o.config);
    for (const char* side : {"classical", "quantum"})
        if (!cfg.contains(side)) throw ConfigError(side, "missing configuration block");
    auto side = [](const json& j) {
        const Resolved r = resolve(j);
        AcquisitionSide s;
        s.kind = r.kind;
        s.field = r.field;
        s.band = r.band;
        s.params = r.params;
        s.coherence_time = r.coherence_time;
        if (j.contains("source") && j.at("source").contains("T0")) s.coherence_time = j.at("source").at("T0").get<double>();
        return s;
    };
    AcquisitionQuery q;
    q.classical = side(cfg.at("classical"));
    q.quantum = side(cfg.at("quantum"));
    if (cfg.contains("target_snr")) q.target_snr = cfg.at("target_snr").get<double>();
    const AcquisitionReport r = compare_acquisition(q);
    const double eta2 = q.quantum.params.eta * q.quantum.params.eta;

    Table t;
    t.header = {"ratio", "ratio_times_eta_sq", "time_quantum", "time_classical", "ratio_full", "consistency", "target_snr"};
    t.rows.push_back({r.ratio, r.ratio * eta2, r.time_quantum, r.time_classical, r.ratio_full, r.consistency,
                      q.target_snr});
    if (o.csv) write_file(*o.csv, to_csv(t));
    if (o.json) {
        json j = {{"comparison", r.comparison},       {"ratio", r.ratio},
                  {"ratio_times_eta_sq", r.ratio * eta2}, {"eta", q.quantum.params.eta},
                  {"time_quantum", r.time_quantum},   {"time_classical", r.time_classical},
                  {"ratio_full", r.ratio_full},       {"time_quantum_full", r.time_quantum_full},
                  {"time_classical_full", r.time_classical_full},
                  {"consistency", r.consistency},     {"degenerate", r.degenerate},
                  {"target_snr", q.target_snr},       {"warnings", warnings_json(r.warnings)}};
        out << j.dump(2) << "\n";
        return kOk;
    }
    out << "comparison: " << r.comparison << "\n";
    out << "T_q/T_c = " << format_number(r.ratio) << " = " << format_number(r.ratio * eta2) << "/eta^2 at eta="
        << format_number(q.quantum.params.eta) << "\n";
    out << "T_I for SNR " << format_number(q.target_snr) << ": quantum " << format_number(r.time_quantum)
        << " s, classical " << format_number(r.time_classical) << " s\n";
    out << "complete-formula inversion: ratio " << format_number(r.ratio_full) << " (relative gap "
        << format_number(r.consistency) << ")\n";
    print_warnings(out, r.warnings);
    return kOk;
}

}  // namespace ghostsnr::cli
