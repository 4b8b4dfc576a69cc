#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "ghostsnr/errors.hpp"

using namespace ghostsnr;
using namespace ghostsnr::cli;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const json& j) {
    const auto p = std::filesystem::temp_directory_path() / ("ghostsnr_test_" + name);
    std::ofstream(p) << j.dump();
    return p.string();
}

json fig2a_point() {
    return json::parse(R"({
      "source": {"kind": "thermal", "I": 100},
      "detector": {"eta": 0.9, "omegaB_T0": 10, "rho0sq_over_A1": 10},
      "mask": {"AT_prime_over_rho0sq": 1e4, "transmission": 1},
      "correlator": {"TI_over_T0": 1}
    })");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, SnrFigurePoint) {
    Options o;
    o.config = write_temp("fig2a.json", fig2a_point());
    std::ostringstream out;
    EXPECT_EQ(cmd_snr(o, out), kOk);
    EXPECT_NE(out.str().find("0.000250632829"), std::string::npos) << out.str();

    o.json = true;
    std::ostringstream js;
    cmd_snr(o, js);
    const auto j = json::parse(js.str());
    EXPECT_NEAR(j.at("snr_normalized").get<double>(), 2.506e-4, 5e-8);
    EXPECT_EQ(format_number(j.at("snr").get<double>()), "0.000250632829");
}

TEST(Cli, MissingEtaNamesField) {
    auto cfg = fig2a_point();
    cfg["detector"].erase("eta");
    try {
        resolve(cfg);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "detector.eta");
    }
}

TEST(Cli, AliasConflict) {
    auto cfg = fig2a_point();
    cfg["detector"]["A1"] = 0.1;
    EXPECT_THROW(resolve(cfg), ConfigError);
}

TEST(Cli, PhysicalConfigMatchesNormalized) {
    // I = P T0 rho0^2 / a0^2 = 100, Omega_B T0 = 10, rho0^2/A1 = 10
    const auto cfg = json::parse(R"({
      "source": {"kind": "thermal", "P": 1e15, "a0": 1e-2, "rho0": 1e-4, "T0": 1e-9, "wavelength": 5e-7},
      "geometry": {"L": 0.01},
      "detector": {"eta": 0.9, "omegaB": 1e10, "A1": 1e-9},
      "mask": {"shape": "gaussian", "size": 1.1283791670955126e-2},
      "correlator": {"TI": 1e-9}
    })");
    const auto r = resolve(cfg);
    ASSERT_TRUE(r.physical.has_value());
    EXPECT_NEAR(r.params.brightness, 100.0, 1e-9);
    EXPECT_NEAR(r.params.cells, 1e4, 1e-6);
    EXPECT_EQ(r.field, FieldRegime::NearField);
}

TEST(Cli, CsvRowAndStability) {
    Options o;
    auto cfg = fig2a_point();
    cfg["sweep"] = {{"variable", "I"}, {"from", 1e-2}, {"to", 1e2}, {"points", 5}};
    o.config = write_temp("sweep.json", cfg);
    const auto csv = (std::filesystem::temp_directory_path() / "ghostsnr_test_sweep.csv").string();
    o.csv = csv;
    std::ostringstream out;
    cmd_snr(o, out);
    const auto first = slurp(csv);
    cmd_snr(o, out);
    EXPECT_EQ(first, slurp(csv));
    std::istringstream lines(first);
    std::string header, row;
    std::getline(lines, header);
    EXPECT_EQ(header.rfind("I,omegaB_T0,", 0), 0u);
    int n = 0;
    while (std::getline(lines, row)) ++n;
    EXPECT_EQ(n, 5);
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
}

TEST(Cli, FiguresPassColumnChecks) {
    for (const char* name : {"2a", "2b", "3a", "3b", "4a", "4b"}) {
        const auto f = make_figure(name);
        EXPECT_EQ(f.table.rows.size(), 200u);
        EXPECT_EQ(f.table.header.front(), "brightness");
        EXPECT_EQ(f.table.header.back(), "high_asymptote");
        for (const auto& c : check_figure(f)) EXPECT_TRUE(c.ok) << name << ": " << c.property << " " << c.detail;
    }
    const auto f = make_figure("2a");
    for (const auto& row : f.table.rows) EXPECT_NEAR(row.back(), std::sqrt(2 * std::numbers::pi) * 1e-4, 1e-16);
    EXPECT_THROW(make_figure("5c"), ConfigError);
}

TEST(Cli, AcquisitionExamples) {
    const json side_c = json::parse(R"({
      "source": {"kind": "thermal", "I": 1e4},
      "detector": {"eta": 0.9, "omegaB_T0": 1e-2, "rho0sq_over_A1": 10},
      "mask": {"AT_prime_over_rho0sq": 1e4}, "correlator": {"TI_over_T0": 1}})");
    json side_q = side_c;
    side_q["source"] = {{"kind", "quantum-ps"}, {"I", 1e-3}};
    Options o;
    o.json = true;
    o.config = write_temp("acq.json", json{{"classical", side_c}, {"quantum", side_q}, {"target_snr", 10}});
    std::ostringstream out;
    EXPECT_EQ(cmd_acquisition(o, out), kOk);
    const auto j = json::parse(out.str());
    EXPECT_NEAR(j.at("ratio_times_eta_sq").get<double>() / 0.01, 1.0, 0.02);

    o.config = write_temp("acq_eq.json", json{{"classical", side_c}, {"quantum", side_c}});
    std::ostringstream eq;
    cmd_acquisition(o, eq);
    EXPECT_EQ(json::parse(eq.str()).at("ratio").get<double>(), 1.0);
}

TEST(Cli, ValidateMcRejectsQuantum) {
    auto cfg = fig2a_point();
    cfg["source"] = {{"kind", "quantum-ps"}, {"I", 1e-2}};
    cfg["correlator"]["TI_over_T0"] = 1000;
    Options o;
    o.mc = true;
    o.config = write_temp("qmc.json", cfg);
    std::ostringstream out;
    try {
        cmd_validate(o, out);
        FAIL();
    } catch (const UnsupportedState& e) {
        EXPECT_NE(std::string(e.what()).find("no proper P representation; use --oracle"), std::string::npos);
    }
}

TEST(Cli, ValidateOracleReports) {
    auto cfg = fig2a_point();
    cfg["correlator"]["TI_over_T0"] = 1000;
    cfg["source"]["I"] = 1e4;
    Options o;
    o.oracle = true;
    o.json = true;
    o.config = write_temp("oracle.json", cfg);
    std::ostringstream out;
    const int rc = cmd_validate(o, out);
    const auto j = json::parse(out.str());
    EXPECT_EQ(rc, j.at("pass").get<bool>() ? kOk : kValidationFailure);
    EXPECT_NEAR(j.at("tolerance").get<double>(), 0.15, 0);
    EXPECT_TRUE(j.contains("term_ledger"));
    EXPECT_LE(std::abs(j.at("relative_difference").get<double>()), 0.15);
}
