#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace cpnet::cli;
    CLI::App app{"Core-periphery interbank robustness experiments"};
    app.require_subcommand(1);

    struct Entry {
        Kind kind;
        const char* help;
        std::string config;
        CLI::App* cmd = nullptr;
    };
    std::vector<Entry> entries = {
        {Kind::Paths, "Simulate robustness paths and write per-path and summary CSVs", {}},
        {Kind::Table1, "Ensemble means and deviations over theta_P with and without a core shock", {}},
        {Kind::Converge, "Coupled finite/limit discrepancies over growing tiered networks", {}},
        {Kind::Fpt, "Expected first passage times and IFPT risk (quadrature and/or Monte Carlo)", {}},
        {Kind::Hedge, "Friction increase restoring std and IFPT risk after a volatility move", {}},
        {Kind::RiskCurves, "IFPT risk against theta per mu, and the two hedging strategies against mu", {}},
        {Kind::ValidateNet, "Check a network file (or the configured tiered network) against all invariants", {}},
    };

    Overrides ov;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t paths = 0;
    unsigned threads = 0;
    for (auto& e : entries) {
        e.cmd = app.add_subcommand(to_string(e.kind), e.help);
        e.cmd->add_option("config", e.config, "Experiment config file (INI); defaults apply when omitted")
            ->check(CLI::ExistingFile);
        e.cmd->add_option("--seed", seed, "Override experiment.seed");
        e.cmd->add_option("--out", out, "Override experiment.out (output directory)");
        e.cmd->add_option("--paths", paths, "Override simulation.paths and fpt.mc_paths")->check(CLI::PositiveNumber);
        e.cmd->add_option("--threads", threads, "Override experiment.threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    for (auto& e : entries) {
        if (!e.cmd->parsed()) continue;
        if (e.cmd->count("--seed")) ov.seed = seed;
        if (e.cmd->count("--out")) ov.out = out;
        if (e.cmd->count("--paths")) ov.paths = paths;
        if (e.cmd->count("--threads")) ov.threads = threads;
        return run(e.kind, e.config, ov, std::cout, std::cerr);
    }
    return kExitConfig;
}
