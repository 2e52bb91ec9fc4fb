// sslab_main.cpp
//
// Scenario-driven command line front end.
//
//   sslab spectrum --scenario s.json [--out dir] [--oracle]
//   sslab check    --scenario s.json [--out dir] [--k n] [--oracle]
//   sslab audit    --scenario s.json [--out dir] [--k n]
//   sslab sweep    --scenario s.json --resolutions 64,128,256 [--out dir]
//
// Exit codes: 0 all checks pass, 1 a check failed beyond tolerance,
// 2 configuration or numerical error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sslab/scenario.hpp"

namespace {

std::vector<int> parse_resolutions(const std::string& csv) {
    std::vector<int> out;
    std::string token;
    std::istringstream is(csv);
    while (std::getline(is, token, ',')) {
        if (token.empty()) continue;
        try {
            out.push_back(std::stoi(token));
        } catch (...) {
            throw sslab::ConfigError("bad resolution '" + token + "' in --resolutions");
        }
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw sslab::Error("cannot write '" + path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eigenvalue checks for weighted divergence-form operators on "
                 "discretized shrinker geometries"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::string resolutions_csv;
    int k_override = -1;
    bool force_oracle = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "output directory");
    };
    CLI::App* cmd_spectrum = app.add_subcommand("spectrum", "solve and dump the spectrum");
    add_common(cmd_spectrum);
    cmd_spectrum->add_flag("--oracle", force_oracle, "force the analytic sphere path");

    CLI::App* cmd_check = app.add_subcommand("check", "run every inequality check");
    add_common(cmd_check);
    cmd_check->add_option("--k", k_override, "override the scenario k");
    cmd_check->add_flag("--oracle", force_oracle, "force the analytic sphere path");

    CLI::App* cmd_audit = app.add_subcommand("audit", "audit the proof-internal identities");
    add_common(cmd_audit);
    cmd_audit->add_option("--k", k_override, "override the scenario k");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "convergence sweep over resolutions");
    add_common(cmd_sweep);
    cmd_sweep->add_option("--resolutions", resolutions_csv, "comma-separated list")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const sslab::Scenario scenario = sslab::parse_scenario_file(scenario_path);
        std::filesystem::create_directories(out_dir);
        sslab::RunOverrides overrides;
        if (k_override >= 1) overrides.k = k_override;
        overrides.force_oracle = force_oracle;

        if (app.got_subcommand(cmd_sweep)) {
            const std::vector<int> resolutions = parse_resolutions(resolutions_csv);
            const sslab::SweepResult sr = sslab::sweep(scenario, resolutions);
            write_text(out_dir + "/sweep.csv", sslab::sweep_csv(sr));
            const std::string summary = sslab::sweep_summary(sr);
            write_text(out_dir + "/summary.txt", summary);
            std::cout << summary;
            return sr.failed > 0 ? 1 : 0;
        }

        sslab::RunMode mode = sslab::RunMode::Check;
        if (app.got_subcommand(cmd_spectrum)) mode = sslab::RunMode::SpectrumOnly;
        if (app.got_subcommand(cmd_audit)) mode = sslab::RunMode::Audit;

        const sslab::ScenarioResult result = sslab::run_scenario(scenario, mode, overrides);
        sslab::write_eigenvalue_csv(result, out_dir + "/eigenvalues.csv");
        if (mode != sslab::RunMode::SpectrumOnly)
            sslab::write_report_json(result, out_dir + "/report.json");
        const std::string summary = sslab::summary_text(result);
        write_text(out_dir + "/summary.txt", summary);
        std::cout << summary;
        return mode == sslab::RunMode::SpectrumOnly ? 0 : result.exit_code();
    } catch (const sslab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
