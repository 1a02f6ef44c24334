// commands.hpp - the five pfsim subcommands as callable functions.
//
// Exit codes: 0 success, 1 validation (unreadable or invalid input),
// 2 runtime (convergence, generation, output failures).
#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pfsim/analysis.hpp"
#include "pfsim/csv.hpp"
#include "pfsim/scenario.hpp"
#include "pfsim/simulation.hpp"

namespace pfsim::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// Runs `body`, mapping exceptions onto exit codes with a diagnostic on `err`.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "invalid scenario:\n";
        for (const auto& v : e.violations()) err << "  " << v << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kValidation;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const InvalidParameter& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kValidation;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kRuntime;
    }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path));
}

/// Day-0 environment: share feedback plus the deltas of events at step 0.
inline Environment initial_environment(const Scenario& s) {
    Environment env;
    env.share_feedback = s.beta_share;
    return apply_events(env, s.events, 0);
}

inline std::string run_csv(const Scenario& s, std::vector<StepRecord>& records) {
    records = run(s);
    std::ostringstream csv;
    csv << "# seed=" << s.seed << '\n';
    write_csv(records, csv);
    return csv.str();
}

inline int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& out_csv,
                   const std::optional<std::filesystem::path>& svg_path, std::optional<std::uint64_t> seed,
                   std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Scenario s = load_scenario(scenario_path);
        if (seed) s.seed = *seed;

        Simulation sim(s);
        const Environment env0 = initial_environment(s);
        std::vector<AgentParams> population;
        for (const auto& a : sim.state().agents) population.push_back(a.params);
        const std::size_t movers =
            first_movers(population, env0, s.integrity, zero_support_reputation(sim.reputation())).size();

        std::vector<StepRecord> records;
        records.reserve(static_cast<std::size_t>(s.horizon));
        while (!sim.finished()) records.push_back(sim.step());

        std::ostringstream csv;
        csv << "# seed=" << s.seed << '\n';
        write_csv(records, csv);
        write_file(out_csv, csv.str());
        if (svg_path) {
            if (records.empty()) throw InvalidParameter("horizon 0 produces no records to plot");
            write_file(*svg_path, render_svg(records, SvgOptions{.title = s.name}));
        }

        out << "scenario=" << s.name << " seed=" << s.seed << " steps=" << records.size();
        if (!records.empty()) {
            const auto& last = records.back();
            out << " share_R=" << format_fixed6(last.share_R) << " share_U=" << format_fixed6(last.share_U)
                << " share_NJ=" << format_fixed6(last.share_NJ) << " exited=" << last.n_exited;
        }
        out << " first_movers=" << movers << '\n';
        return static_cast<int>(kOk);
    });
}

/// Closed-form thresholds of every agent at the t = 0, zero-support state.
struct AgentThresholds {
    AgentId id;
    PrivateType private_type;
    double r_over_nj;
    double nj_over_u;
    double p0;
};

inline std::vector<AgentThresholds> initial_thresholds(const Scenario& s, const Simulation& sim) {
    const Environment env0 = initial_environment(s);
    const auto reputation = zero_support_reputation(sim.reputation());
    std::vector<AgentThresholds> rows;
    for (const auto& agent : sim.state().agents) {
        const AgentParams eff = effective_params(agent.params, env0);
        const auto soft = initial_soft_terms(agent.params, s.integrity, &reputation[agent.id]);
        rows.push_back({agent.id, agent.params.private_type,
                        threshold_r_over_nj(eff, soft[Position::R], soft[Position::NJ]),
                        threshold_nj_over_u(eff, soft[Position::NJ], soft[Position::U]),
                        perceived_probability(eff, 0.0, env0)});
    }
    return rows;
}

inline int cmd_thresholds(const std::filesystem::path& scenario_path, const std::filesystem::path& out_csv,
                          std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = load_scenario(scenario_path);
        Simulation sim(s);
        std::ostringstream csv;
        csv << "id,x,threshold_R_over_NJ,threshold_NJ_over_U,p0\n";
        const auto rows = initial_thresholds(s, sim);
        for (const auto& r : rows) {
            csv << r.id << ',' << to_string(r.private_type) << ',' << format_fixed6(r.r_over_nj) << ','
                << format_fixed6(r.nj_over_u) << ',' << format_fixed6(r.p0) << '\n';
        }
        write_file(out_csv, csv.str());
        out << "wrote " << rows.size() << " threshold rows to " << out_csv.string() << '\n';
        return static_cast<int>(kOk);
    });
}

/// Per-agent R-over-NJ thresholds re-expressed on the share axis, so that an
/// agent joins when beta_share * s exceeds its entry.
inline std::vector<double> share_thresholds(const std::vector<AgentThresholds>& rows, const Scenario& s,
                                            const Simulation& sim) {
    const Environment env0 = initial_environment(s);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        const double thr = r.r_over_nj;
        if (thr >= 1.0) {
            out.push_back(std::numeric_limits<double>::infinity());
        } else if (thr < 0.0) {
            out.push_back(-std::numeric_limits<double>::infinity());
        } else {
            const auto& a = sim.state().agents[r.id].params;
            out.push_back(thr - a.base_success_belief - env0.offsets.success_belief);
        }
    }
    return out;
}

inline int cmd_equilibrium(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = load_scenario(scenario_path);
        Simulation sim(s);
        const auto rows = initial_thresholds(s, sim);
        const auto thresholds = share_thresholds(rows, s, sim);
        const double beta = s.beta_share;
        const auto report = cascade_equilibria(thresholds, [beta](double share) { return beta * share; });

        std::size_t neg_inf = 0, pos_inf = 0;
        std::vector<double> finite;
        for (double t : report.sorted_thresholds) {
            if (t == -std::numeric_limits<double>::infinity()) ++neg_inf;
            else if (t == std::numeric_limits<double>::infinity()) ++pos_inf;
            else finite.push_back(t);
        }
        out << "agents: " << thresholds.size() << '\n';
        out << "thresholds: finite=" << finite.size() << " -inf=" << neg_inf << " +inf=" << pos_inf;
        if (!finite.empty()) {
            out << " min=" << format_fixed6(finite.front()) << " median=" << format_fixed6(finite[finite.size() / 2])
                << " max=" << format_fixed6(finite.back());
        }
        out << '\n';
        out << "equilibria:";
        for (double e : report.equilibria) out << ' ' << format_fixed6(e);
        out << '\n';
        out << "equilibrium from zero: " << format_fixed6(report.from_zero) << " after "
            << report.iterations_from_zero << " iterations\n";
        out << "tipping seed: ";
        if (report.tipping_seed) out << *report.tipping_seed << " of " << thresholds.size() << '\n';
        else out << "none\n";
        return static_cast<int>(kOk);
    });
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
};

inline SweepSpec parse_sweep_spec(std::string_view text, std::uint64_t default_seed) {
    const auto doc = parse_json_document(text);
    std::vector<std::string> problems;
    SweepSpec spec;
    if (!doc.is_object()) throw ValidationError({"sweep spec: expected an object"});
    for (const auto& [key, _] : doc.items()) {
        if (key != "parameter" && key != "values" && key != "grid" && key != "seeds") {
            problems.push_back(key + ": unknown field");
        }
    }
    if (!doc.contains("parameter") || !doc["parameter"].is_string()) problems.push_back("parameter: expected a string");
    else spec.parameter = doc["parameter"].get<std::string>();

    const bool has_values = doc.contains("values");
    const bool has_grid = doc.contains("grid");
    if (has_values == has_grid) {
        problems.push_back("exactly one of values, grid is required");
    } else if (has_values) {
        const auto& v = doc["values"];
        if (!v.is_array() || v.empty()) problems.push_back("values: expected a non-empty array of numbers");
        else
            for (const auto& x : v) {
                if (!x.is_number()) problems.push_back("values: expected numbers");
                else spec.values.push_back(x.get<double>());
            }
    } else {
        const auto& g = doc["grid"];
        if (!g.is_object() || !g.contains("lo") || !g.contains("hi") || !g.contains("count") || g.size() != 3 ||
            !g["lo"].is_number() || !g["hi"].is_number() || !g["count"].is_number_integer()) {
            problems.push_back("grid: expected {\"lo\": number, \"hi\": number, \"count\": integer}");
        } else {
            const double lo = g["lo"].get<double>();
            const double hi = g["hi"].get<double>();
            const auto count = g["count"].get<std::int64_t>();
            if (count < 1) problems.push_back("grid.count >= 1 violated");
            for (std::int64_t i = 0; i < count; ++i) {
                spec.values.push_back(count == 1 ? lo
                                                 : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
            }
        }
    }
    if (doc.contains("seeds")) {
        const auto& s = doc["seeds"];
        if (!s.is_array() || s.empty()) problems.push_back("seeds: expected a non-empty array of integers");
        else
            for (const auto& x : s) {
                if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0)) {
                    problems.push_back("seeds: expected nonnegative integers");
                } else {
                    spec.seeds.push_back(x.get<std::uint64_t>());
                }
            }
    } else {
        spec.seeds.push_back(default_seed);
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return spec;
}

/// Locates `path` (dot keys, [i] indices) inside `doc`; throws ValidationError
/// unless it names an existing numeric field.
inline nlohmann::json& resolve_numeric(nlohmann::json& doc, const std::string& path) {
    nlohmann::json* node = &doc;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) -> nlohmann::json& {
        throw ValidationError({"sweep parameter '" + path + "': " + why});
    };
    if (path.empty()) return fail("empty path");
    while (i < path.size()) {
        if (path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string::npos) return fail("unterminated index");
            std::size_t index = 0;
            const auto* first = path.data() + i + 1;
            const auto* last = path.data() + close;
            auto [ptr, ec] = std::from_chars(first, last, index);
            if (ec != std::errc{} || ptr != last) return fail("bad index");
            if (!node->is_array() || index >= node->size()) return fail("index out of range");
            node = &(*node)[index];
            i = close + 1;
            if (i < path.size() && path[i] == '.') ++i;
        } else {
            const auto end = path.find_first_of(".[", i);
            const std::string key = path.substr(i, end == std::string::npos ? std::string::npos : end - i);
            if (key.empty() || !node->is_object() || !node->contains(key)) return fail("no field '" + key + "'");
            node = &(*node)[key];
            i = end == std::string::npos ? path.size() : end;
            if (i < path.size() && path[i] == '.') ++i;
        }
    }
    if (!node->is_number()) return fail("not a numeric field");
    return *node;
}

inline std::string sanitize_parameter(std::string p) {
    std::replace_if(p.begin(), p.end(), [](char c) { return c == '[' || c == ']' || c == '.'; }, '_');
    return p;
}

inline std::string format_value(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Scenario with `parameter` set to `value` and the seed replaced.
inline Scenario sweep_variant(const Scenario& base, const std::string& parameter, double value, std::uint64_t seed) {
    auto doc = scenario_to_json(base);
    auto& field = resolve_numeric(doc, parameter);
    if (field.is_number_integer() && std::floor(value) == value) {
        if (value < 0) field = static_cast<std::int64_t>(value);
        else field = static_cast<std::uint64_t>(value);
    } else {
        field = value;
    }
    doc["seed"] = seed;
    return scenario_from_json(doc);
}

inline int cmd_sweep(const std::filesystem::path& scenario_path, const std::filesystem::path& sweep_path,
                     const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario base = load_scenario(scenario_path);
        SweepSpec spec;
        try {
            spec = parse_sweep_spec(read_file(sweep_path), base.seed);
        } catch (const ParseError& e) {
            throw ParseError(std::string("sweep spec ") + e.what(), e.line(), e.column());
        }

        struct Job {
            double value;
            std::uint64_t seed;
            Scenario scenario;
        };
        std::vector<Job> jobs;
        for (double v : spec.values)
            for (std::uint64_t seed : spec.seeds) jobs.push_back({v, seed, sweep_variant(base, spec.parameter, v, seed)});

        struct Result {
            std::string csv;
            std::vector<StepRecord> records;
        };
        std::vector<Result> results(jobs.size());
        const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), jobs.size()));
        for (std::size_t start = 0; start < jobs.size(); start += workers) {
            std::vector<std::future<void>> batch;
            for (std::size_t j = start; j < std::min(jobs.size(), start + workers); ++j) {
                batch.push_back(std::async(std::launch::async, [&, j] {
                    results[j].csv = run_csv(jobs[j].scenario, results[j].records);
                }));
            }
            for (auto& f : batch) f.get();
        }

        std::filesystem::create_directories(out_dir);
        const std::string stem = sanitize_parameter(spec.parameter);
        std::ostringstream summary;
        summary << "parameter,value,seed,t,share_R,share_U,share_NJ,n_exited,n_falsifying\n";
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const std::string value = format_value(jobs[j].value);
            write_file(out_dir / (stem + "=" + value + "_seed=" + std::to_string(jobs[j].seed) + ".csv"), results[j].csv);
            summary << spec.parameter << ',' << value << ',' << jobs[j].seed << ',';
            if (results[j].records.empty()) {
                summary << ",,,,,\n";
            } else {
                const auto& last = results[j].records.back();
                summary << last.t << ',' << format_fixed6(last.share_R) << ',' << format_fixed6(last.share_U) << ','
                        << format_fixed6(last.share_NJ) << ',' << last.n_exited << ',' << last.n_falsifying << '\n';
            }
        }
        write_file(out_dir / "summary.csv", summary.str());
        out << "ran " << jobs.size() << " runs into " << out_dir.string() << '\n';
        return static_cast<int>(kOk);
    });
}

inline int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = load_scenario(scenario_path);
        for (const auto& w : scenario_warnings(s)) err << "warning: " << w << '\n';
        out << "OK\n";
        return static_cast<int>(kOk);
    });
}

} // namespace pfsim::cli
