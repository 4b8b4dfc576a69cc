#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "render.hpp"

namespace ghostsnr::cli {

enum ExitCode { kOk = 0, kValidationFailure = 2, kNonConvergence = 3 };

struct Options {
    std::optional<std::string> config;
    bool json = false;
    std::optional<std::string> csv;
    std::optional<std::string> svg;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> tolerance;
    std::string figure;  // figure name
    bool oracle = false;
    bool mc = false;
};

int cmd_snr(const Options& o, std::ostream& out);
int cmd_figure(const Options& o, std::ostream& out);
int cmd_validate(const Options& o, std::ostream& out);
int cmd_acquisition(const Options& o, std::ostream& out);

struct Figure {
    std::string name;
    std::string title;
    std::vector<double> bandwidth_products;
    Table table;
};

// Figure data: brightness, one normalized-SNR column per Omega_B T0, then the low and high
// asymptotes of the first column. `overrides` is the "figure" block of a config (may be null).
Figure make_figure(const std::string& name, const nlohmann::json& overrides = nullptr);

struct FigureCheck {
    std::string property;
    bool ok;
    std::string detail;
};
std::vector<FigureCheck> check_figure(const Figure& f);

}  // namespace ghostsnr::cli
