#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghostsnr/analytic.hpp"
#include "ghostsnr/model.hpp"

namespace ghostsnr::cli {

struct SweepSpec {
    std::string variable = "I";
    double from = 1e-8;
    double to = 1e8;
    int points = 200;
};

// A configuration after aliases are resolved: normalized parameters for the closed forms, a
// detection-plane model for the oracle and the simulator, and the physical query when SI values
// were supplied.
struct Resolved {
    SourceKind kind = SourceKind::Thermal;
    FieldRegime field = FieldRegime::NearField;
    BandRegime band = BandRegime::Narrowband;
    NormalizedParams params;
    PlaneModel plane;
    std::optional<SnrQuery> physical;
    std::optional<RegimeReport> regime;
    double coherence_time = 1.0;  // [s] when physical, else 1
    std::vector<RegimeWarning> warnings;
    std::optional<SweepSpec> sweep;
    std::optional<std::string> csv;
    std::optional<std::string> svg;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> tolerance;
    nlohmann::json figure;  // figure overrides, if any
};

nlohmann::json load_json(const std::string& path);
Resolved resolve(const nlohmann::json& cfg);
Resolved load_config(const std::string& path);

// Default plane-model envelope for normalized configurations: wide enough that the mask sees a
// flat illumination.
double default_envelope(const MaskSpec& mask, Vec2 pinhole);

}  // namespace ghostsnr::cli
