// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "pfsim/analysis.hpp"
#include "pfsim/baseline.hpp"
#include "pfsim/csv.hpp"
#include "pfsim/simulation.hpp"
#include "support.hpp"

using namespace pfsim;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

AgentParams random_factors(Rng& rng) {
    AgentParams a = testkit::random_agent(rng);
    a.violence_rebel = uniform(rng, 0, 10);
    a.violence_status_quo = uniform(rng, 0, 10);
    a.violence_abstain = uniform(rng, 0, 10);
    return a;
}

struct ThresholdCase {
    AgentParams agent;
    PositionMap<SoftTerms> soft;
};

std::vector<ThresholdCase> threshold_sample() {
    Rng rng = make_rng(2014, RngStream::Population);
    std::vector<ThresholdCase> out;
    for (int i = 0; i < 10000; ++i) {
        ThresholdCase c;
        c.agent = random_factors(rng);
        c.soft = testkit::random_soft(rng);
        out.push_back(c);
    }
    return out;
}

// Each threshold compares `above` against `below`: above wins iff p > threshold.
struct Pair {
    Position above;
    Position below;
    double threshold;
};

std::vector<Pair> pairs_of(const ThresholdCase& c) {
    return {{Position::R, Position::NJ, threshold_r_over_nj(c.agent, c.soft[Position::R], c.soft[Position::NJ])},
            {Position::NJ, Position::U, threshold_nj_over_u(c.agent, c.soft[Position::NJ], c.soft[Position::U])}};
}

Outcome threshold_argmax_equivalence(const std::vector<ThresholdCase>& sample) {
    const auto start = Clock::now();
    std::size_t checked = 0, mismatched = 0;
    for (const auto& c : sample) {
        for (const auto& pr : pairs_of(c)) {
            if (!std::isfinite(pr.threshold)) continue;
            for (double p : {pr.threshold - 1e-6, pr.threshold + 1e-6}) {
                if (p < 0.0 || p > 1.0) continue;
                const bool above_wins =
                    payoff(c.agent, pr.above, p, c.soft[pr.above]) > payoff(c.agent, pr.below, p, c.soft[pr.below]);
                ++checked;
                if (above_wins != (p > pr.threshold)) ++mismatched;
            }
        }
    }
    const double secs = seconds_since(start);
    return {mismatched == 0 && checked > 0 && secs < 5.0,
            fmt("%zu agents, %zu comparisons, %zu mismatches, %.3f s", sample.size(), checked, mismatched, secs)};
}

Outcome crossing_identity(const std::vector<ThresholdCase>& sample) {
    std::size_t checked = 0, violations = 0;
    double worst = 0.0;
    for (const auto& c : sample) {
        for (const auto& pr : pairs_of(c)) {
            const double p = pr.threshold;
            if (!std::isfinite(p) || p < 0.0 || p > 1.0) continue;
            const double a = payoff(c.agent, pr.above, p, c.soft[pr.above]);
            const double b = payoff(c.agent, pr.below, p, c.soft[pr.below]);
            const double rel = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
            worst = std::max(worst, rel);
            ++checked;
            if (rel > 1e-9) ++violations;
        }
    }
    return {violations == 0 && checked > 0,
            fmt("%zu crossings, %zu violations, worst scaled gap %.3g", checked, violations, worst)};
}

Outcome dominance() {
    Rng rng = make_rng(31, RngStream::Population);
    std::size_t violations = 0;
    const PositionMap<SoftTerms> none{};
    for (int i = 0; i < 10000; ++i) {
        const AgentParams a = testkit::random_agent(rng);
        for (int k = 0; k <= 10; ++k) {
            for (Position previous : {Position::NJ, Position::R}) {
                if (decide(a, k / 10.0, none, previous) == Position::U) ++violations;
            }
        }
    }
    return {violations == 0, fmt("10000 agents x 11 probabilities, %zu agents chose U", violations)};
}

Outcome domino() {
    auto identity = [](double s) { return s; };
    std::vector<double> thresholds;
    for (int i = 0; i < 10; ++i) thresholds.push_back(i / 10.0);
    const auto full = cascade_equilibria(thresholds, identity);
    thresholds.erase(thresholds.begin());
    const auto without_first = cascade_equilibria(thresholds, identity);
    const bool cascades = full.from_zero == 1.0 && full.iterations_from_zero == 10;
    const bool stalls = without_first.from_zero == 0.0;
    return {cascades && stalls, fmt("full ladder: from zero -> %.1f after %zu iterations (want 1.0 after 10); "
                                    "without the 0.0 agent: %.1f (want 0.0)",
                                    full.from_zero, full.iterations_from_zero, without_first.from_zero)};
}

Outcome tipping_seed() {
    const std::vector<double> thresholds(10, 0.5);
    const auto report = cascade_equilibria(thresholds, [](double s) { return s; });
    std::string eq;
    for (double e : report.equilibria) eq += fmt("%s%.1f", eq.empty() ? "" : ", ", e);
    const bool ok = report.equilibria == std::vector<double>{0.0, 1.0} && report.tipping_seed == std::size_t{6};
    return {ok, "equilibria {" + eq + "}, tipping seed " +
                    (report.tipping_seed ? std::to_string(*report.tipping_seed) : std::string("none"))};
}

std::vector<Position> single_step(const std::vector<AgentParams>& agents, const ReputationModel& model,
                                  const IntegritySpec& integ, FactorOffsets offsets) {
    SimState state;
    state.env.share_feedback = 0.5;
    state.env.offsets = offsets;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        AgentState a;
        a.id = i;
        a.params = agents[i];
        state.agents.push_back(a);
    }
    step(state, StepContext{model, integ, std::nullopt, {}});
    std::vector<Position> out;
    for (const auto& a : state.agents) out.push_back(a.position);
    return out;
}

Outcome monotone_fear() {
    std::size_t u_violations = 0, r_violations = 0, u_base = 0, r_base = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng = make_rng(seed, RngStream::Population);
        std::vector<AgentParams> agents;
        for (int i = 0; i < 1000; ++i) {
            AgentParams a = testkit::random_agent(rng);
            a.violence_rebel = uniform(rng, -3, 3);
            a.violence_status_quo = uniform(rng, -3, 3);
            a.base_success_belief *= 0.5;
            agents.push_back(a);
        }
        const auto net = generate_network(SmallWorld{8, 0.2}, agents.size(), seed);
        ReputationSpec rep;
        rep.alpha = 1.0;
        const ReputationModel model(net, rep);
        const IntegritySpec integ{1.0, 0.5, 0.1, 2.0};

        FactorOffsets more_fear, more_hope;
        more_fear.oppose_cost = 1.0;
        more_hope.success_belief = 0.1;
        const auto base = single_step(agents, model, integ, {});
        const auto fear = single_step(agents, model, integ, more_fear);
        const auto hope = single_step(agents, model, integ, more_hope);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            u_base += base[i] == Position::U;
            r_base += base[i] == Position::R;
            if (fear[i] == Position::U && base[i] != Position::U) ++u_violations;
            if (base[i] == Position::R && hope[i] != Position::R) ++r_violations;
        }
    }
    return {u_violations == 0 && r_violations == 0,
            fmt("5 populations of 1000: U set %zu agents, %zu joined U under dC+1; R set %zu agents, %zu left R under "
                "dp+0.1",
                u_base, u_violations, r_base, r_violations)};
}

Outcome baseline_trends() {
    const auto start = Clock::now();
    const auto records = run(donbass_baseline());
    const double secs = seconds_since(start);

    std::size_t u_rises = 0;
    for (std::size_t t = 37; t < records.size(); ++t)
        if (records[t].share_U > records[t - 1].share_U) ++u_rises;
    int crossing = -1;
    for (const auto& r : records) {
        if (r.share_R > 0.5) {
            crossing = r.t;
            break;
        }
    }
    std::size_t falsification_drops = 0;
    for (std::size_t t = 46; t <= 90; ++t)
        if (records[t].n_falsifying_status_quo < records[t - 1].n_falsifying_status_quo) ++falsification_drops;

    const bool ok = records.size() == kBaselineHorizon && u_rises == 0 && crossing >= 0 && crossing < 120 &&
                    falsification_drops == 0 && secs < 10.0;
    return {ok, fmt("%zu steps in %.2f s; share_U rises after day 36: %zu; share_R > 0.5 first on day %d; "
                    "pro-status-quo falsifier drops over days 45-90: %zu",
                    records.size(), secs, u_rises, crossing, falsification_drops)};
}

Outcome conservation_and_determinism() {
    std::vector<std::string> texts;
    for (const char* name : {"hand_trace.json", "small_random.json", "domino_midpoint.json", "all_half.json"}) {
        texts.push_back(testkit::slurp(testkit::fixture(name)));
    }
    {
        Scenario with_exit = parse_scenario(texts[1]);
        with_exit.exit = ExitRule{0.5, 2};
        texts.push_back(serialize_scenario(with_exit));
    }
    texts.push_back(testkit::slurp(testkit::scenario_file("donbass_baseline.json")));

    std::size_t steps = 0, conservation_failures = 0, byte_mismatches = 0;
    for (const auto& text : texts) {
        const Scenario s = parse_scenario(text);
        Simulation sim(s);
        while (!sim.finished()) {
            const auto rec = sim.step();
            std::size_t counts[3] = {0, 0, 0}, exited = 0;
            for (const auto& a : sim.state().agents) {
                if (a.exited) ++exited;
                else ++counts[static_cast<std::size_t>(a.position)];
            }
            if (counts[0] + counts[1] + counts[2] + exited != s.n_total() || exited != rec.n_exited) {
                ++conservation_failures;
            }
            ++steps;
        }
        std::string csv[2], svg[2];
        for (int k = 0; k < 2; ++k) {
            const auto records = run(parse_scenario(text));
            std::ostringstream out;
            write_csv(records, out);
            csv[k] = out.str();
            svg[k] = records.empty() ? "" : render_svg(records);
        }
        if (csv[0] != csv[1] || svg[0] != svg[1]) ++byte_mismatches;
    }
    return {conservation_failures == 0 && byte_mismatches == 0,
            fmt("%zu scenarios, %zu steps, %zu conservation failures, %zu CSV/SVG byte mismatches", texts.size(), steps,
                conservation_failures, byte_mismatches)};
}

Outcome influence_solver() {
    const std::vector<Edge> chain{{0, 1, 1}, {1, 2, 1}};
    const auto oracle = testkit::power_iteration_oracle(3, chain, 0.85);
    double worst = 0.0, worst_sum = 0.0;
    bool converged = true;
    try {
        const auto scores = influence_scores(SocialNetwork(3, chain), 0.85, 1e-12, 200);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(scores[i] - oracle[i]));
        worst_sum = std::abs(std::accumulate(scores.begin(), scores.end(), 0.0) - 1.0);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto net = generate_network(seed % 2 ? NetworkKind{ErdosRenyi{0.05}} : NetworkKind{SmallWorld{6, 0.3}},
                                              200, seed);
            const auto s = influence_scores(net, 0.85, 1e-12, 200);
            worst_sum = std::max(worst_sum, std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0));
        }
    } catch (const ConvergenceError& e) {
        converged = false;
    }
    return {converged && worst <= 1e-8 && worst_sum <= 1e-9,
            fmt("chain max deviation from oracle %.3g, worst |sum - 1| %.3g over 21 graphs, %s within 200 iterations",
                worst, worst_sum, converged ? "converged" : "did not converge")};
}

Outcome hand_trace() {
    using enum Position;
    const std::vector<std::vector<Position>> expected{
        {R, NJ, NJ}, {R, R, NJ}, {R, R, NJ}, {R, R, NJ}, {R, R, NJ}, {R, R, NJ}, {R, R, U}, {R, R, NJ}, {R, R, NJ}};
    Simulation sim(parse_scenario(testkit::slurp(testkit::fixture("hand_trace.json"))));
    std::size_t matched = 0;
    int first_mismatch = -1;
    while (!sim.finished()) {
        const int t = sim.state().t;
        sim.step();
        if (static_cast<std::size_t>(t) < expected.size() && sim.positions() == expected[t]) ++matched;
        else if (first_mismatch < 0) first_mismatch = t;
    }
    return {matched == expected.size() && first_mismatch < 0,
            fmt("%zu of %zu steps match", matched, expected.size()) +
                (first_mismatch < 0 ? std::string() : fmt("; first mismatch at t=%d", first_mismatch))};
}

} // namespace

int main() {
    const auto sample = threshold_sample();
    struct Criterion {
        int id;
        const char* name;
        Outcome outcome;
    };
    std::vector<Criterion> results;
    auto guarded = [](auto&& fn) -> Outcome {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };
    results.push_back({1, "threshold-argmax equivalence", guarded([&] { return threshold_argmax_equivalence(sample); })});
    results.push_back({2, "crossing identity", guarded([&] { return crossing_identity(sample); })});
    results.push_back({3, "dominance of no-join over status quo", guarded(dominance)});
    results.push_back({4, "uniform-threshold domino", guarded(domino)});
    results.push_back({5, "tipping seed", guarded(tipping_seed)});
    results.push_back({6, "monotone fear", guarded(monotone_fear)});
    results.push_back({7, "baseline qualitative trends", guarded(baseline_trends)});
    results.push_back({8, "conservation and determinism", guarded(conservation_and_determinism)});
    results.push_back({9, "influence solver", guarded(influence_solver)});
    results.push_back({10, "hand-trace oracle", guarded(hand_trace)});

    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s  %2d  %-40s %s\n", r.outcome.pass ? "PASS" : "FAIL", r.id, r.name, r.outcome.detail.c_str());
        failed += !r.outcome.pass;
    }
    std::printf("%zu of %zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
