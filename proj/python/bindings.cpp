#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghostsnr/acquisition.hpp"
#include "ghostsnr/analytic.hpp"
#include "ghostsnr/mc.hpp"
#include "ghostsnr/model.hpp"
#include "ghostsnr/wick.hpp"

namespace py = pybind11;
using namespace ghostsnr;

namespace {

py::dict result_dict(const SnrResult& r) {
    py::dict d;
    d["formula"] = to_string(r.formula);
    d["snr"] = r.snr;
    d["snr_normalized"] = r.snr_normalized;
    py::dict terms;
    for (const auto& t : r.noise_terms) terms[py::str(t.label)] = t.value;
    d["noise_terms"] = terms;
    d["dominant_term"] = r.dominant_term;
    d["low_asymptote"] = r.asymptotes_normalized.low_brightness;
    d["high_asymptote"] = r.asymptotes_normalized.high_brightness;
    py::list ws;
    for (const auto& w : r.warnings) ws.append(py::make_tuple(w.code, w.message));
    d["warnings"] = ws;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Signal-to-noise ratio of Gaussian-state ghost imaging: closed forms, moment oracle, simulator.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", PyExc_ValueError);
    py::register_exception<UnsupportedState>(m, "UnsupportedState", PyExc_ValueError);
    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

    py::enum_<SourceKind>(m, "SourceKind")
        .value("THERMAL", SourceKind::Thermal)
        .value("CLASSICAL_PS", SourceKind::ClassicalPhaseSensitive)
        .value("QUANTUM_PS", SourceKind::QuantumPhaseSensitive);
    py::enum_<FieldRegime>(m, "FieldRegime")
        .value("NEAR", FieldRegime::NearField)
        .value("FAR", FieldRegime::FarField)
        .value("INTERMEDIATE", FieldRegime::Intermediate);
    py::enum_<BandRegime>(m, "BandRegime")
        .value("NARROW", BandRegime::Narrowband)
        .value("BROAD", BandRegime::Broadband)
        .value("INTERMEDIATE", BandRegime::Intermediate);
    py::enum_<Formula>(m, "Formula")
        .value("THERMAL_NB", Formula::ThermalNarrowband)
        .value("THERMAL_BB", Formula::ThermalBroadband)
        .value("QUANTUM_NB_NEAR", Formula::QuantumNarrowbandNear)
        .value("QUANTUM_BB_NEAR", Formula::QuantumBroadbandNear)
        .value("QUANTUM_NB_FAR", Formula::QuantumNarrowbandFar)
        .value("QUANTUM_BB_FAR", Formula::QuantumBroadbandFar);

    py::class_<NormalizedParams>(m, "NormalizedParams")
        .def(py::init([](double I, double x, double r, double n, double eta, double tau, double ratio) {
                 NormalizedParams p{I, x, r, n, eta, tau, ratio};
                 return p;
             }),
             py::arg("I") = 1.0, py::arg("omegaB_T0") = 10.0, py::arg("rho0sq_over_A1") = 10.0,
             py::arg("AT_prime_over_rho0sq") = 1e4, py::arg("eta") = 0.9, py::arg("transmission") = 1.0,
             py::arg("TI_over_T0") = 1.0)
        .def_readwrite("I", &NormalizedParams::brightness)
        .def_readwrite("omegaB_T0", &NormalizedParams::bandwidth_product)
        .def_readwrite("rho0sq_over_A1", &NormalizedParams::pinhole_ratio)
        .def_readwrite("AT_prime_over_rho0sq", &NormalizedParams::cells)
        .def_readwrite("eta", &NormalizedParams::eta)
        .def_readwrite("transmission", &NormalizedParams::transmission)
        .def_readwrite("TI_over_T0", &NormalizedParams::averaging_ratio);

    m.def("select_formula", &select_formula, py::arg("kind"), py::arg("field"), py::arg("band"));
    m.def("classify_band", [](double x) { return classify_band(x); }, py::arg("omegaB_T0"));
    m.def(
        "snr", [](Formula f, const NormalizedParams& p) { return result_dict(evaluate(f, p)); }, py::arg("formula"),
        py::arg("params"), "Closed-form SNR as a dict.");
    m.def(
        "optimal_brightness",
        [](Formula f, const NormalizedParams& p) {
            const auto o = optimal_brightness(f, p);
            py::dict d;
            d["I_opt"] = o.I_opt;
            d["snr_normalized"] = o.snr_normalized_at_opt;
            d["monotone"] = o.monotone;
            return d;
        },
        py::arg("formula"), py::arg("params"));

    py::class_<Vec2>(m, "Vec2")
        .def(py::init([](double x, double y) { return Vec2{x, y}; }), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y);

    py::class_<MaskSpec>(m, "MaskSpec")
        .def_static("disk", &MaskSpec::disk, py::arg("radius"), py::arg("center") = Vec2{})
        .def_static("gaussian_spot", &MaskSpec::gaussian_spot, py::arg("waist"), py::arg("center") = Vec2{})
        .def_static("uniform", &MaskSpec::uniform, py::arg("value"))
        .def("effective_area", &MaskSpec::effective_area)
        .def("transmissivity_at", [](const MaskSpec& s, double x, double y) { return s.transmissivity_at({x, y}); });

    py::class_<PlaneModel>(m, "PlaneModel")
        .def(py::init<>())
        .def_readwrite("kind", &PlaneModel::kind)
        .def_readwrite("field", &PlaneModel::field)
        .def_readwrite("I", &PlaneModel::brightness)
        .def_readwrite("envelope_radius", &PlaneModel::envelope_radius)
        .def_readwrite("omegaB_T0", &PlaneModel::bandwidth_product)
        .def_readwrite("omegaN_T0", &PlaneModel::notch_product)
        .def_readwrite("pinhole_area", &PlaneModel::pinhole_area)
        .def_readwrite("eta", &PlaneModel::eta)
        .def_readwrite("pinhole_pos", &PlaneModel::pinhole_pos)
        .def_readwrite("mask", &PlaneModel::mask);

    m.def("oracle_mean", [](const PlaneModel& pm) { return wick::mean_C(pm); }, py::arg("model"));
    m.def(
        "oracle_snr",
        [](const PlaneModel& pm, double ratio) {
            const auto r = wick::variance_C(pm, ratio);
            py::dict d;
            d["mean"] = r.mean;
            d["variance"] = r.variance;
            d["snr"] = r.snr;
            py::dict ledger;
            for (const auto& e : r.term_ledger) ledger[py::str(e.term_class)] = e.value;
            d["term_ledger"] = ledger;
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("model"), py::arg("TI_over_T0"));
    m.def(
        "mc_snr",
        [](const PlaneModel& pm, double ratio, int trials, std::uint64_t seed) {
            mc::McEstimate e;
            {
                py::gil_scoped_release release;
                e = mc::estimate_snr(pm, ratio, trials, seed);
            }
            py::dict d;
            d["snr"] = e.snr_hat;
            d["std_error"] = e.std_error;
            d["mean"] = e.mean_C;
            d["mean_std_error"] = e.mean_stderr;
            d["inconclusive"] = e.inconclusive;
            d["modes"] = e.modes;
            d["warnings"] = e.warnings;
            return d;
        },
        py::arg("model"), py::arg("TI_over_T0"), py::arg("trials") = 1000, py::arg("seed") = 1);

    m.def(
        "acquisition_ratio",
        [](Formula classical, Formula quantum, const NormalizedParams& pc, const NormalizedParams& pq, double T0c,
           double T0q) {
            auto side = [](Formula f, const NormalizedParams& p, double T0) {
                AcquisitionSide s;
                s.params = p;
                s.coherence_time = T0;
                s.band = classify_band(p.bandwidth_product);
                switch (f) {
                    case Formula::ThermalNarrowband:
                    case Formula::ThermalBroadband: s.kind = SourceKind::Thermal; break;
                    case Formula::QuantumNarrowbandFar:
                    case Formula::QuantumBroadbandFar:
                        s.kind = SourceKind::QuantumPhaseSensitive;
                        s.field = FieldRegime::FarField;
                        break;
                    default: s.kind = SourceKind::QuantumPhaseSensitive;
                }
                return s;
            };
            AcquisitionQuery q;
            q.classical = side(classical, pc, T0c);
            q.quantum = side(quantum, pq, T0q);
            const auto r = compare_acquisition(q);
            py::dict d;
            d["comparison"] = r.comparison;
            d["ratio"] = r.ratio;
            d["ratio_full"] = r.ratio_full;
            d["consistency"] = r.consistency;
            return d;
        },
        py::arg("classical"), py::arg("quantum"), py::arg("classical_params"), py::arg("quantum_params"),
        py::arg("classical_T0") = 1.0, py::arg("quantum_T0") = 1.0);
}
