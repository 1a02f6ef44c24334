// simulation.hpp - a scenario instantiated as population + network, stepped
// to its horizon.
#pragma once

#include <utility>
#include <vector>

#include "pfsim/dynamics.hpp"
#include "pfsim/reputation.hpp"
#include "pfsim/scenario.hpp"

namespace pfsim {

class Simulation {
public:
    explicit Simulation(const Scenario& scenario)
        : Simulation(scenario, generate_population(scenario.population, scenario.seed),
                     build_network(scenario.network, scenario.n_total(), scenario.seed)) {}

    Simulation(const Scenario& scenario, std::vector<AgentParams> population, SocialNetwork network)
        : scenario_(scenario), network_(std::move(network)), reputation_(network_, scenario_.reputation) {
        if (population.size() != network_.size()) throw InvalidParameter("population and network sizes differ");
        state_.env.share_feedback = scenario_.beta_share;
        state_.agents.reserve(population.size());
        for (std::size_t i = 0; i < population.size(); ++i) {
            AgentState a;
            a.id = i;
            a.params = population[i];
            a.position = Position::NJ;
            state_.agents.push_back(std::move(a));
        }
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    bool finished() const { return state_.t >= scenario_.horizon; }

    StepRecord step() {
        if (finished()) throw InvalidParameter("step called at the horizon");
        return pfsim::step(state_, StepContext{reputation_, scenario_.integrity, scenario_.exit, scenario_.events});
    }

    const SimState& state() const noexcept { return state_; }
    const SocialNetwork& network() const noexcept { return network_; }
    const ReputationModel& reputation() const noexcept { return reputation_; }
    const Scenario& scenario() const noexcept { return scenario_; }

    std::vector<Position> positions() const {
        std::vector<Position> out;
        out.reserve(state_.agents.size());
        for (const auto& a : state_.agents) out.push_back(a.position);
        return out;
    }

private:
    Scenario scenario_;
    SocialNetwork network_;
    ReputationModel reputation_;
    SimState state_;
};

/// Runs a scenario from the all-NJ start for `horizon` steps.
inline std::vector<StepRecord> run(const Scenario& scenario) {
    if (auto problems = validate_scenario(scenario); !problems.empty()) throw ValidationError(std::move(problems));
    Simulation sim(scenario);
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(scenario.horizon));
    while (!sim.finished()) records.push_back(sim.step());
    return records;
}

} // namespace pfsim
