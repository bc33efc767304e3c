// qecho: quench-echo simulator for the transverse-field Ising chain.
#include "qecho/cli_io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    CLI::App app{"Quench-echo adiabaticity test on the transverse-field Ising chain"};
    app.set_version_flag("--version", qecho::tool_version);
    app.require_subcommand(1);

    const std::map<std::string, std::string> about = {
        {"simulate", "evolve a schedule (echoed by default) and write the P_GS trace"},
        {"sweep", "echo fidelity and observables over a tau_q grid"},
        {"schedule-gen", "tabulate a KZM or RC uniformly adiabatic schedule"},
        {"compare-analytic", "numeric echo fidelity against the closed-form interference product"},
        {"min-tau", "smallest sustained-adiabatic tau_q, optionally per segment"},
        {"echo-test", "single echo test with verdict and regime hint"},
        {"gap", "finite-N and infinite-chain gap between g0 and gt"},
    };
    for (const auto& [name, text] : about) app.add_subcommand(name, text)->fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "key=value file; flags given on the command line win");
    const std::map<std::string, std::string> help = {
        {"n", "chain length, even, >= 4"},
        {"j", "coupling J"},
        {"g0", "start field (echo returns here)"},
        {"gt", "turnaround field"},
        {"tau-q", "linear quench time scale, rate 1/tau_q"},
        {"delay", "hold time at the turnaround"},
        {"schedule", "linear | kzm | rc | file"},
        {"schedule-file", "t,g table for schedule=file"},
        {"gamma", "KZM ratio"},
        {"gamma-prime", "RC ratio, 0 = 2 gamma / pi"},
        {"start-fraction", "kzm/rc: start on the shared clock, 0 = clamp to [g0, gt]"},
        {"echo", "simulate: append the reversed schedule"},
        {"threshold", "verdict threshold, 0 = command default"},
        {"segments", "min-tau: number of equal sub-intervals"},
        {"window", "min-tau: grid points that must also pass"},
        {"tau-floor", "min-tau: lowest tau_q tried"},
        {"tau-ceiling", "min-tau: highest tau_q tried"},
        {"tau-min", "sweep grid start"},
        {"tau-max", "sweep grid end"},
        {"tau-points", "sweep grid size"},
        {"tau-log", "log-spaced sweep grid"},
        {"range", "compare-analytic: half | all modes"},
        {"phase", "compare-analytic: stokes | printed"},
        {"rel-tol", "integrator relative tolerance"},
        {"abs-tol", "integrator absolute tolerance"},
        {"max-step", "largest time step, 0 = automatic"},
        {"samples", "trace samples"},
        {"threads", "OpenMP threads, 0 = default"},
        {"out", "output table; <out>.meta gets the resolved config"},
    };
    std::map<std::string, std::string> given;
    for (const auto& key : qecho::config_keys()) {
        const auto it = help.find(key);
        app.add_option("--" + key, given[key], it == help.end() ? std::string() : it->second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::vector<std::pair<std::string, std::string>> flags;
    for (const auto& key : qecho::config_keys())
        if (app.count("--" + key) > 0) flags.emplace_back(key, given[key]);

    try {
        const auto file = config_path.empty() ? decltype(flags){} : qecho::read_config_file(config_path);
        const qecho::RunConfig cfg = qecho::resolve_config(file, flags);
        return qecho::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout);
    } catch (const qecho::Error& e) {
        std::cerr << "qecho: " << e.what() << "\n";
        return qecho::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "qecho: " << e.what() << "\n";
        return 2;
    }
}
