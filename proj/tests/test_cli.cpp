#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "pfsim/baseline.hpp"
#include "support.hpp"

using namespace pfsim;
using namespace pfsim::cli;
using testkit::fixture;
using testkit::slurp;

namespace {

struct Captured {
    int code;
    std::string out;
    std::string err;
};

template <class Fn>
Captured capture(Fn&& fn) {
    std::ostringstream out, err;
    const int code = fn(out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST(CliRun, DeterministicOutput) {
    const auto dir = testkit::scratch("run");
    const auto scenario = fixture("small_random.json");
    const auto a = capture([&](auto& o, auto& e) { return cmd_run(scenario, dir / "a.csv", dir / "a.svg", {}, o, e); });
    const auto b = capture([&](auto& o, auto& e) { return cmd_run(scenario, dir / "b.csv", dir / "b.svg", {}, o, e); });
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a.svg"), slurp(dir / "b.svg"));
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("share_R="), std::string::npos);
    EXPECT_NE(a.out.find("first_movers="), std::string::npos);
    const auto rows = lines(slurp(dir / "a.csv"));
    EXPECT_EQ(rows[0], "# seed=42");
    EXPECT_EQ(rows[1], kCsvHeader);
    EXPECT_EQ(rows.size(), 32u);
}

TEST(CliRun, SeedOverrideRecorded) {
    const auto dir = testkit::scratch("seed");
    const auto r = capture([&](auto& o, auto& e) {
        return cmd_run(fixture("small_random.json"), dir / "s.csv", std::nullopt, 7, o, e);
    });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(slurp(dir / "s.csv"))[0], "# seed=7");
}

TEST(CliRun, MalformedScenarioNamesField) {
    const auto dir = testkit::scratch("malformed");
    std::string text = slurp(fixture("hand_trace.json"));
    text.replace(text.find("\"horizon\""), 9, "\"horizn\"");
    const auto path = write_text(dir, "bad.json", text);
    const auto r = capture([&](auto& o, auto& e) { return cmd_run(path, dir / "o.csv", std::nullopt, {}, o, e); });
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("horizn"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "o.csv"));
}

TEST(CliRun, SyntaxErrorAndMissingFileAreValidationErrors) {
    const auto dir = testkit::scratch("syntax");
    const auto path = write_text(dir, "bad.json", "{ \"seed\": ");
    EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(path, dir / "o.csv", std::nullopt, {}, o, e); }).code, 1);
    EXPECT_EQ(capture([&](auto& o, auto& e) {
                  return cmd_run(dir / "missing.json", dir / "o.csv", std::nullopt, {}, o, e);
              }).code,
              1);
}

TEST(CliRun, ConvergenceFailureIsRuntimeError) {
    const auto dir = testkit::scratch("converge");
    auto doc = parse_json_document(slurp(fixture("small_random.json")));
    doc["reputation"] = {{"variant", "iterative_influence"}, {"alpha", 1.0}, {"tol", 1e-300}, {"max_iters", 3}};
    const auto path = write_text(dir, "c.json", doc.dump());
    const auto r = capture([&](auto& o, auto& e) { return cmd_run(path, dir / "o.csv", std::nullopt, {}, o, e); });
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("converge"), std::string::npos);
}

TEST(CliRun, UnwritableOutputIsRuntimeError) {
    const auto dir = testkit::scratch("unwritable");
    const auto r = capture([&](auto& o, auto& e) {
        return cmd_run(fixture("single_rebel.json"), dir / "no" / "such" / "dir.csv", std::nullopt, {}, o, e);
    });
    EXPECT_EQ(r.code, 2);
}

TEST(CliThresholds, CornerCases) {
    const auto dir = testkit::scratch("thresholds");
    const auto r = capture([&](auto& o, auto& e) { return cmd_thresholds(fixture("thresholds.json"), dir / "t.csv", o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(dir / "t.csv"));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "id,x,threshold_R_over_NJ,threshold_NJ_over_U,p0");
    EXPECT_EQ(rows[1].substr(0, 24), "0,pro_rebellion,0.000000");
    EXPECT_EQ(rows[2], "1,pro_status_quo,-inf,inf,0.000000");
}

TEST(CliThresholds, RowsAgreeWithArgmax) {
    const auto dir = testkit::scratch("thresholds-random");
    const auto scenario_path = fixture("small_random.json");
    ASSERT_EQ(capture([&](auto& o, auto& e) { return cmd_thresholds(scenario_path, dir / "t.csv", o, e); }).code, 0);
    const Scenario s = load_scenario(scenario_path);
    Simulation sim(s);
    const auto rows = lines(slurp(dir / "t.csv"));
    ASSERT_EQ(rows.size(), s.n_total() + 1);
    const Environment env0 = initial_environment(s);
    const auto reputation = zero_support_reputation(sim.reputation());
    std::size_t checked = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream row(rows[i]);
        std::string id, x, t_r, t_u, p0;
        std::getline(row, id, ',');
        std::getline(row, x, ',');
        std::getline(row, t_r, ',');
        std::getline(row, t_u, ',');
        std::getline(row, p0, ',');
        const auto& agent = sim.state().agents[std::stoul(id)];
        EXPECT_EQ(x, to_string(agent.params.private_type));
        const AgentParams eff = effective_params(agent.params, env0);
        const auto soft = initial_soft_terms(agent.params, s.integrity, &reputation[agent.id]);
        auto check = [&](const std::string& cell, Position above, Position below) {
            if (cell == "inf" || cell == "-inf") return;
            const double t = std::stod(cell);
            for (double p : {t - 1e-4, t + 1e-4}) {
                if (p < 0 || p > 1) continue;
                const double e_above = payoff(eff, above, p, soft[above]);
                const double e_below = payoff(eff, below, p, soft[below]);
                EXPECT_EQ(e_above > e_below, p > t) << rows[i];
                ++checked;
            }
        };
        check(t_r, Position::R, Position::NJ);
        check(t_u, Position::NJ, Position::U);
    }
    EXPECT_GT(checked, 100u);
}

TEST(CliEquilibrium, HalfStepDominoReachesOne) {
    const auto r = capture([&](auto& o, auto& e) { return cmd_equilibrium(fixture("domino_midpoint.json"), o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("equilibrium from zero: 1.000000 after 10 iterations"), std::string::npos) << r.out;
}

TEST(CliEquilibrium, ExactLadderStallsUnderStrictRule) {
    const auto r = capture([&](auto& o, auto& e) { return cmd_equilibrium(fixture("domino.json"), o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("equilibrium from zero: 0.000000"), std::string::npos) << r.out;
}

TEST(CliEquilibrium, AllHalf) {
    const auto r = capture([&](auto& o, auto& e) { return cmd_equilibrium(fixture("all_half.json"), o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("equilibria: 0.000000 1.000000\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("equilibrium from zero: 0.000000"), std::string::npos);
    EXPECT_NE(r.out.find("tipping seed: 6 of 10"), std::string::npos);
}

TEST(CliEquilibrium, EmptyPopulationIsValidationError) {
    const auto dir = testkit::scratch("empty");
    auto doc = parse_json_document(slurp(fixture("single_rebel.json")));
    doc["population"]["groups"][0]["count"] = 0;
    const auto path = write_text(dir, "e.json", doc.dump());
    EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_equilibrium(path, o, e); }).code, 1);
}

TEST(CliSweep, SingleRunMatchesRun) {
    const auto dir = testkit::scratch("sweep-one");
    const auto spec = write_text(dir, "spec.json", R"({"parameter": "beta_share", "values": [0.5], "seeds": [42]})");
    const auto r = capture([&](auto& o, auto& e) { return cmd_sweep(fixture("small_random.json"), spec, dir / "out", o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(capture([&](auto& o, auto& e) {
                  return cmd_run(fixture("small_random.json"), dir / "run.csv", std::nullopt, {}, o, e);
              }).code,
              0);
    EXPECT_EQ(slurp(dir / "out" / "beta_share=0.5_seed=42.csv"), slurp(dir / "run.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.csv"));
}

TEST(CliSweep, OpposeCostGridIsMonotone) {
    const auto dir = testkit::scratch("sweep-dc");
    const auto r = capture([&](auto& o, auto& e) {
        return cmd_sweep(fixture("small_random.json"), fixture("sweep_dC.json"), dir, o, e);
    });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "events_0__deltas_dC=0.5_seed=2.csv"));
    const auto rows = lines(slurp(dir / "summary.csv"));
    ASSERT_EQ(rows.size(), 11u);
    std::map<std::string, std::vector<double>> share_u_by_seed;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> cells;
        std::istringstream row(rows[i]);
        for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
        share_u_by_seed[cells[2]].push_back(std::stod(cells[5]));
    }
    for (const auto& [seed, shares] : share_u_by_seed) {
        ASSERT_EQ(shares.size(), 5u);
        for (std::size_t i = 1; i < shares.size(); ++i) EXPECT_LE(shares[i], shares[i - 1]) << "seed " << seed;
    }
}

TEST(CliSweep, NonNumericPathRejected) {
    const auto dir = testkit::scratch("sweep-bad");
    const auto r = capture([&](auto& o, auto& e) {
        return cmd_sweep(fixture("small_random.json"), fixture("sweep_bad_path.json"), dir / "out", o, e);
    });
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("not a numeric field"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(CliSweep, PathResolution) {
    auto doc = scenario_to_json(donbass_baseline());
    EXPECT_DOUBLE_EQ(resolve_numeric(doc, "events[3].deltas.dF").get<double>(), 0.2);
    EXPECT_DOUBLE_EQ(resolve_numeric(doc, "population.groups[1].factors.F.uniform.hi").get<double>(), 1.0);
    EXPECT_THROW(resolve_numeric(doc, "events[999].deltas.dC"), ValidationError);
    EXPECT_THROW(resolve_numeric(doc, "name"), ValidationError);
    EXPECT_THROW(resolve_numeric(doc, "nope"), ValidationError);
    EXPECT_EQ(sanitize_parameter("events[3].deltas.dC"), "events_3__deltas_dC");
    EXPECT_EQ(format_value(0.1), "0.1");
    EXPECT_EQ(format_value(2), "2");
}

TEST(CliValidate, ExportedBaselineIsOk) {
    const auto r = capture([&](auto& o, auto& e) { return cmd_validate(testkit::scenario_file("donbass_baseline.json"), o, e); });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "OK\n");
}

TEST(CliValidate, ListsViolations) {
    const auto dir = testkit::scratch("validate");
    auto doc = parse_json_document(slurp(fixture("single_rebel.json")));
    doc["population"]["groups"][0]["factors"]["C"] = 1;
    doc["population"]["groups"][0]["factors"]["c"] = 2;
    doc["events"] = nlohmann::json::array({{{"step", 50}, {"label", "late"}}});
    const auto path = write_text(dir, "v.json", doc.dump());
    const auto r = capture([&](auto& o, auto& e) { return cmd_validate(path, o, e); });
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("C >= c violated"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("beyond horizon"), std::string::npos) << r.err;
}
