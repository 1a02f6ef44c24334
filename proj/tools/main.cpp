#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pfsim - preference falsification and rebellion simulator"};
    app.require_subcommand(1);

    std::string scenario, out, svg, sweep;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Simulate a scenario to its horizon and write per-step CSV");
    run->add_option("scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--out", out, "Output CSV path")->required();
    run->add_option("--svg", svg, "Optional SVG plot path");
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");

    auto* thresholds = app.add_subcommand("thresholds", "Write every agent's t=0 thresholds as CSV");
    thresholds->add_option("scenario", scenario, "Scenario JSON file")->required();
    thresholds->add_option("--out", out, "Output CSV path")->required();

    auto* equilibrium = app.add_subcommand("equilibrium", "Report threshold-cascade equilibria");
    equilibrium->add_option("scenario", scenario, "Scenario JSON file")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a grid of one parameter and several seeds");
    sweep_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
    sweep_cmd->add_option("sweepspec", sweep, "Sweep spec JSON file")->required();
    sweep_cmd->add_option("--out", out, "Output directory")->required();

    auto* validate = app.add_subcommand("validate", "Check a scenario and list violations");
    validate->add_option("scenario", scenario, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pfsim::cli::kValidation;
    }

    using namespace pfsim::cli;
    if (*run) {
        return cmd_run(scenario, out, svg.empty() ? std::nullopt : std::optional<std::filesystem::path>(svg),
                       seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, std::cout, std::cerr);
    }
    if (*thresholds) return cmd_thresholds(scenario, out, std::cout, std::cerr);
    if (*equilibrium) return cmd_equilibrium(scenario, std::cout, std::cerr);
    if (*sweep_cmd) return cmd_sweep(scenario, sweep, out, std::cout, std::cerr);
    return cmd_validate(scenario, std::cout, std::cerr);
}
