#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ghostsnr/errors.hpp"

namespace {

void common_flags(CLI::App* app, ghostsnr::cli::Options& o) {
    app->add_option("--config", o.config, "JSON configuration file");
    app->add_flag("--json", o.json, "machine-readable output on stdout");
    app->add_option("--csv", o.csv, "write a CSV table");
    app->add_option("--svg", o.svg, "write an SVG plot");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ghostsnr;
    using namespace ghostsnr::cli;

    CLI::App app{"ghostsnr: signal-to-noise ratio of Gaussian-state ghost imaging"};
    app.require_subcommand(1);
    Options o;

    auto* snr = app.add_subcommand("snr", "closed-form SNR for a configuration");
    common_flags(snr, o);

    auto* fig = app.add_subcommand("figure", "SNR versus brightness curves");
    common_flags(fig, o);
    fig->add_option("name", o.figure, "2a, 2b, 3a, 3b, 4a or 4b")->required();

    auto* val = app.add_subcommand("validate", "compare the closed form against the oracle or the simulator");
    common_flags(val, o);
    val->add_flag("--oracle", o.oracle, "exact Gaussian-moment oracle");
    val->add_flag("--mc", o.mc, "Monte Carlo simulation");
    val->add_option("--tolerance", o.tolerance, "relative tolerance (oracle) or |z| limit (mc)");

    auto* acq = app.add_subcommand("acquisition", "quantum versus classical acquisition time");
    common_flags(acq, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kValidationFailure;
    }

    try {
        if (snr->parsed()) return cmd_snr(o, std::cout);
        if (fig->parsed()) return cmd_figure(o, std::cout);
        if (val->parsed()) return cmd_validate(o, std::cout);
        if (acq->parsed()) return cmd_acquisition(o, std::cout);
    } catch (const NonConvergence& e) {
        std::cerr << "error: numerical non-convergence: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const ConfigError& e) {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const UnsupportedRegime& e) {
        std::cerr << "error: unsupported regime: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const UnsupportedState& e) {
        std::cerr << "error: unsupported state: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationFailure;
    }
    return kOk;
}
