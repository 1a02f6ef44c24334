// baseline.hpp - built-in Donbass spring 2014 scenario.
//
// One step is one day, day 0 = March 1, 2014. The event directions follow
// the chronology (beatings raise the cost of opposing, the pledge of
// protection lowers the expected arrest cost and raises the belief in
// success, recurring attacks raise both costs and the belief in success).
// All magnitudes, group sizes and factor distributions are illustrative
// calibration constants, not measured values.
#pragma once

#include <string>
#include <vector>

#include "pfsim/scenario.hpp"

namespace pfsim {

inline constexpr int kBaselineHorizon = 120;
inline constexpr std::size_t kBaselinePopulation = 10000;

inline Scenario donbass_baseline() {
    Scenario s;
    s.name = "donbass-2014-baseline";
    s.seed = 20140301;
    s.horizon = kBaselineHorizon;
    s.beta_share = 0.4;

    PopulationGroup core;
    core.label = "pro-rebellion core";
    core.count = 1000;
    core.private_type = PrivateType::ProRebellion;
    core.factors.F = Uniform{4.0, 10.0};
    core.factors.S = Uniform{0.5, 2.0};
    core.factors.A_U = Uniform{2.0, 6.0};
    core.factors.A_R = Constant{0.0};
    core.factors.c = Constant{0.0};
    core.factors.C = Uniform{1.0, 3.0};
    core.factors.V_R = TruncNormal{1.0, 2.0, -3.0, 6.0};
    core.factors.V_U = Constant{-1.0};
    core.factors.V_NJ = Constant{0.0};
    core.factors.p_base = Uniform{0.15, 0.45};

    PopulationGroup activists;
    activists.label = "pro-status-quo activists";
    activists.count = 2000;
    activists.private_type = PrivateType::ProStatusQuo;
    activists.factors.F = Uniform{0.0, 1.0};
    activists.factors.S = Uniform{4.0, 8.0};
    activists.factors.A_U = Uniform{4.0, 8.0};
    activists.factors.A_R = Uniform{1.0, 3.0};
    activists.factors.c = Uniform{0.0, 0.5};
    activists.factors.C = Uniform{0.2, 1.2};
    activists.factors.V_R = Constant{-1.0};
    activists.factors.V_U = TruncNormal{1.0, 0.75, -0.5, 3.0};
    activists.factors.V_NJ = Constant{0.0};
    activists.factors.p_base = Uniform{0.02, 0.15};

    PopulationGroup majority;
    majority.label = "ambivalent majority";
    majority.count = 7000;
    majority.private_type = PrivateType::ProStatusQuo;
    majority.factors.F = Uniform{1.0, 5.0};
    majority.factors.S = Uniform{1.0, 4.0};
    majority.factors.A_U = Uniform{1.0, 4.0};
    majority.factors.A_R = Uniform{0.5, 2.0};
    majority.factors.c = Uniform{0.0, 1.0};
    majority.factors.C = Uniform{1.0, 3.0};
    majority.factors.V_R = TruncNormal{-0.5, 0.5, -2.0, 1.0};
    majority.factors.V_U = TruncNormal{-0.5, 0.5, -2.0, 1.0};
    majority.factors.V_NJ = Constant{0.0};
    majority.factors.p_base = Uniform{0.05, 0.25};

    s.population.groups = {core, activists, majority};
    s.network = SmallWorld{10, 0.1};
    s.reputation = ReputationSpec{ReputationVariant::WeightedFraction, 0.6, true};
    s.integrity = IntegritySpec{1.0, 0.3, 0.0, 1.0};

    auto event = [](int step, std::string label, FactorOffsets d) { return Event{step, std::move(label), d}; };
    FactorOffsets d;

    std::vector<Event> events;
    d = {};
    d.oppose_cost = 0.5;
    events.push_back(event(0, "Kharkiv beating of pro-Kiev protesters", d));
    for (int day : {3, 6, 9}) {
        d = {};
        d.freedom = 0.2;
        d.status_quo = -0.1;
        events.push_back(event(day, "propaganda broadcast", d));
    }
    d = {};
    d.oppose_cost = 0.5;
    events.push_back(event(12, "Donetsk beating of pro-Maidan protesters", d));
    d = {};
    d.success_belief = 0.05;
    events.push_back(event(15, "staged referendum rallies", d));
    d = {};
    d.arrest_cost = -1.0;
    d.success_belief = 0.1;
    events.push_back(event(17, "pledge to protect Russian speakers", d));
    for (int day : {18, 21}) {
        d = {};
        d.freedom = 0.2;
        d.status_quo = -0.1;
        events.push_back(event(day, "propaganda broadcast", d));
    }
    events.push_back(event(24, "ban on Russian TV", FactorOffsets{}));
    d = {};
    d.success_belief = 0.1;
    d.oppose_cost = 0.5;
    events.push_back(event(36, "government buildings seized, war begins", d));
    for (int day = 45; day <= 90; day += 5) {
        d = {};
        d.oppose_cost = 0.4;
        d.abstain_cost = 0.1;
        d.success_belief = 0.02;
        events.push_back(event(day, "attacks on pro-Ukrainian protesters", d));
    }
    s.events = std::move(events);
    return s;
}

} // namespace pfsim
