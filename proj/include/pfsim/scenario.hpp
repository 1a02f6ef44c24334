// scenario.hpp - scenario documents: types, strict JSON parsing, validation,
// canonical serialization and seeded population generation.
//
// The schema is described in docs/scenario-schema.md.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pfsim/dynamics.hpp"
#include "pfsim/errors.hpp"
#include "pfsim/model.hpp"
#include "pfsim/reputation.hpp"
#include "pfsim/rng.hpp"

namespace pfsim {

struct Constant {
    double value = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
};
struct Uniform {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Uniform&, const Uniform&) = default;
};
struct TruncNormal {
    double mean = 0.0;
    double sd = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    friend bool operator==(const TruncNormal&, const TruncNormal&) = default;
};

using Distribution = std::variant<Constant, Uniform, TruncNormal>;

/// Smallest and largest value a distribution can produce.
inline std::pair<double, double> support(const Distribution& d) {
    if (const auto* c = std::get_if<Constant>(&d)) return {c->value, c->value};
    if (const auto* u = std::get_if<Uniform>(&d)) return {u->lo, u->hi};
    const auto& t = std::get<TruncNormal>(d);
    if (t.sd == 0.0) return {t.mean, t.mean};
    return {t.lo, t.hi};
}

/// Attempts per truncated-normal draw and per agent (C >= c rejection).
inline constexpr int kRejectionCap = 1000;

inline std::optional<double> sample(const Distribution& d, Rng& rng) {
    if (const auto* c = std::get_if<Constant>(&d)) return c->value;
    if (const auto* u = std::get_if<Uniform>(&d)) return uniform(rng, u->lo, u->hi);
    const auto& t = std::get<TruncNormal>(d);
    if (t.sd == 0.0) return t.mean;
    for (int i = 0; i < kRejectionCap; ++i) {
        const double v = t.mean + t.sd * standard_normal(rng);
        if (v >= t.lo && v <= t.hi) return v;
    }
    return std::nullopt;
}

struct FactorDistributions {
    Distribution F = Constant{};
    Distribution S = Constant{};
    Distribution A_U = Constant{};
    Distribution A_R = Constant{};
    Distribution c = Constant{};
    Distribution C = Constant{};
    Distribution V_R = Constant{};
    Distribution V_U = Constant{};
    Distribution V_NJ = Constant{};
    Distribution p_base = Constant{};

    friend bool operator==(const FactorDistributions&, const FactorDistributions&) = default;
};

struct PopulationGroup {
    std::string label;
    std::size_t count = 0;
    PrivateType private_type = PrivateType::ProRebellion;
    FactorDistributions factors;

    friend bool operator==(const PopulationGroup&, const PopulationGroup&) = default;
};

struct PopulationSpec {
    std::vector<PopulationGroup> groups;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.count;
        return n;
    }

    friend bool operator==(const PopulationSpec&, const PopulationSpec&) = default;
};

struct ExplicitNetwork {
    std::vector<Edge> edges;
    friend bool operator==(const ExplicitNetwork&, const ExplicitNetwork&) = default;
};

using NetworkSpec = std::variant<CompleteGraph, ErdosRenyi, SmallWorld, ExplicitNetwork>;

enum class UpdateRule { Synchronous };

struct Scenario {
    std::string name = "scenario";
    PopulationSpec population;
    NetworkSpec network = CompleteGraph{};
    ReputationSpec reputation;
    IntegritySpec integrity;
    double beta_share = 0.0;
    std::optional<ExitRule> exit;
    std::vector<Event> events;
    int horizon = 0;
    std::uint64_t seed = 0;
    UpdateRule update = UpdateRule::Synchronous;

    std::size_t n_total() const { return population.total(); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// ---------------------------------------------------------------------------
// Validation

/// Every invariant violation in a scenario; empty when valid.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> out;
    auto bad = [&](std::string msg) { out.push_back(std::move(msg)); };

    if (s.horizon < 0) bad("horizon >= 0 violated");
    if (s.population.total() == 0) bad("population is empty (n_total must be >= 1)");

    for (std::size_t gi = 0; gi < s.population.groups.size(); ++gi) {
        const auto& g = s.population.groups[gi];
        const std::string where = "population.groups[" + std::to_string(gi) + "] (" + g.label + ")";
        auto check = [&](const Distribution& d, const char* name, double min_lo, double max_hi) {
            const std::string field = where + "." + name;
            if (const auto* c = std::get_if<Constant>(&d)) {
                if (!std::isfinite(c->value)) bad(field + ": constant must be finite");
            } else if (const auto* u = std::get_if<Uniform>(&d)) {
                if (!std::isfinite(u->lo) || !std::isfinite(u->hi)) bad(field + ": uniform bounds must be finite");
                else if (u->lo > u->hi) bad(field + ": lo <= hi violated");
            } else {
                const auto& t = std::get<TruncNormal>(d);
                if (!std::isfinite(t.mean)) bad(field + ": mean must be finite");
                if (!std::isfinite(t.sd) || t.sd < 0.0) bad(field + ": sd >= 0 violated");
                if (std::isnan(t.lo) || std::isnan(t.hi) || t.lo > t.hi) bad(field + ": lo <= hi violated");
                else if (t.sd == 0.0 && (t.mean < t.lo || t.mean > t.hi)) bad(field + ": mean outside [lo, hi] with sd 0");
            }
            const auto [lo, hi] = support(d);
            if (lo < min_lo) bad(field + ": support must be >= " + (min_lo == 0.0 ? "0" : std::to_string(min_lo)));
            if (hi > max_hi) bad(field + ": support must be <= 1");
        };
        constexpr double kNoMax = std::numeric_limits<double>::infinity();
        constexpr double kNoMin = -std::numeric_limits<double>::infinity();
        const auto& f = g.factors;
        check(f.F, "F", 0.0, kNoMax);
        check(f.S, "S", 0.0, kNoMax);
        check(f.A_U, "A_U", 0.0, kNoMax);
        check(f.A_R, "A_R", 0.0, kNoMax);
        check(f.c, "c", 0.0, kNoMax);
        check(f.C, "C", 0.0, kNoMax);
        check(f.V_R, "V_R", kNoMin, kNoMax);
        check(f.V_U, "V_U", kNoMin, kNoMax);
        check(f.V_NJ, "V_NJ", kNoMin, kNoMax);
        check(f.p_base, "p_base", 0.0, 1.0);
        if (support(f.C).second < support(f.c).first) bad(where + ": C >= c violated");
    }

    const std::size_t n = s.population.total();
    if (const auto* er = std::get_if<ErdosRenyi>(&s.network)) {
        if (!(er->p_edge >= 0.0 && er->p_edge <= 1.0)) bad("network.p_edge in [0, 1] violated");
    } else if (const auto* sw = std::get_if<SmallWorld>(&s.network)) {
        if (sw->k % 2 != 0) bad("network.k must be even");
        if (n > 0 && sw->k >= n) bad("network.k < n_total violated");
        if (!(sw->rewire_p >= 0.0 && sw->rewire_p <= 1.0)) bad("network.rewire_p in [0, 1] violated");
    } else if (const auto* ex = std::get_if<ExplicitNetwork>(&s.network)) {
        for (std::size_t i = 0; i < ex->edges.size(); ++i) {
            const auto& e = ex->edges[i];
            const std::string where = "network.edges[" + std::to_string(i) + "]";
            if (e.source >= n || e.target >= n) bad(where + ": endpoint out of range");
            if (e.source == e.target) bad(where + ": self-loop");
            if (!std::isfinite(e.weight) || e.weight < 0.0) bad(where + ": weight >= 0 violated");
        }
    }

    const auto& r = s.reputation;
    if (!std::isfinite(r.alpha) || r.alpha < 0.0) bad("reputation.alpha >= 0 violated");
    if (!(r.damping > 0.0 && r.damping < 1.0)) bad("reputation.damping in (0, 1) violated");
    if (!(r.tol > 0.0)) bad("reputation.tol > 0 violated");
    if (r.max_iters < 1) bad("reputation.max_iters >= 1 violated");

    for (auto& msg : check_integrity(s.integrity)) bad(std::move(msg));

    if (!std::isfinite(s.beta_share) || s.beta_share < 0.0) bad("beta_share >= 0 violated");
    if (s.exit) {
        if (std::isnan(s.exit->threshold)) bad("exit.threshold must be a number");
        if (s.exit->patience < 1) bad("exit.patience >= 1 violated");
    }

    int last_step = 0;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        const std::string where = "events[" + std::to_string(i) + "] (" + e.label + ")";
        if (e.step < 0) bad(where + ": step >= 0 violated");
        if (e.step > s.horizon) bad(where + ": step " + std::to_string(e.step) + " beyond horizon " +
                                    std::to_string(s.horizon));
        if (e.step < last_step) bad(where + ": events must be sorted by step");
        last_step = std::max(last_step, e.step);
        if (!e.deltas.all_finite()) bad(where + ": deltas must be finite");
    }
    return out;
}

/// Non-fatal remarks, e.g. C == c where a strict C > c is expected.
inline std::vector<std::string> scenario_warnings(const Scenario& s) {
    std::vector<std::string> out;
    for (std::size_t gi = 0; gi < s.population.groups.size(); ++gi) {
        const auto& f = s.population.groups[gi].factors;
        if (support(f.C).second <= support(f.c).first && support(f.C).second >= support(f.c).first) {
            out.push_back("population.groups[" + std::to_string(gi) + "]: C == c everywhere (C > c expected)");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Population generation

/// Samples agents group by group in declaration order; ids are sequential.
inline std::vector<AgentParams> generate_population(const PopulationSpec& spec, std::uint64_t seed) {
    Rng rng = make_rng(seed, RngStream::Population);
    std::vector<AgentParams> agents;
    agents.reserve(spec.total());
    for (const auto& g : spec.groups) {
        const auto& f = g.factors;
        for (std::size_t i = 0; i < g.count; ++i) {
            bool accepted = false;
            for (int attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
                AgentParams a;
                a.private_type = g.private_type;
                bool ok = true;
                auto draw = [&](const Distribution& d, double& slot) {
                    if (!ok) return;
                    if (auto v = sample(d, rng)) slot = *v;
                    else ok = false;
                };
                draw(f.F, a.freedom_value);
                draw(f.S, a.status_quo_value);
                draw(f.A_U, a.arrest_cost);
                draw(f.A_R, a.reprisal_cost);
                draw(f.c, a.abstain_cost);
                draw(f.C, a.oppose_cost);
                draw(f.V_R, a.violence_rebel);
                draw(f.V_U, a.violence_status_quo);
                draw(f.V_NJ, a.violence_abstain);
                draw(f.p_base, a.base_success_belief);
                if (ok && a.oppose_cost >= a.abstain_cost) {
                    agents.push_back(a);
                    accepted = true;
                }
            }
            if (!accepted) {
                throw GenerationError("group '" + g.label + "': could not draw a valid agent in " +
                                      std::to_string(kRejectionCap) + " attempts");
            }
        }
    }
    return agents;
}

inline SocialNetwork build_network(const NetworkSpec& spec, std::size_t n, std::uint64_t seed) {
    if (const auto* ex = std::get_if<ExplicitNetwork>(&spec)) return SocialNetwork(n, ex->edges);
    if (const auto* er = std::get_if<ErdosRenyi>(&spec)) return generate_network(*er, n, seed);
    if (const auto* sw = std::get_if<SmallWorld>(&spec)) return generate_network(*sw, n, seed);
    return generate_network(CompleteGraph{}, n, seed);
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

// Walks a document, recording every structural problem instead of stopping
// at the first one.
class Reader {
public:
    std::vector<std::string> errors;

    void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    bool expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
        if (!j.is_object()) {
            error(path, "expected an object");
            return false;
        }
        for (const auto& [key, _] : j.items()) {
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (!known) error(path.empty() ? key : path + "." + key, "unknown field");
        }
        return true;
    }

    static std::string join(const std::string& path, std::string_view key) {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            error(path, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    // Numbers, or the strings "inf" / "-inf" for unbounded supports.
    std::optional<double> extended(const json& j, const std::string& path) {
        if (j.is_string()) {
            const auto s = j.get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
        }
        if (!j.is_number()) {
            error(path, "expected a number, \"inf\" or \"-inf\"");
            return std::nullopt;
        }
        return j.get<double>();
    }

    template <class Int>
    std::optional<Int> integer(const json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            error(path, "expected an integer");
            return std::nullopt;
        }
        if constexpr (std::is_unsigned_v<Int>) {
            if (j.is_number_unsigned()) return j.get<Int>();
            const auto v = j.get<std::int64_t>();
            if (v < 0) {
                error(path, "expected a nonnegative integer");
                return std::nullopt;
            }
            return static_cast<Int>(v);
        } else {
            if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
                error(path, "integer out of range");
                return std::nullopt;
            }
            const auto v = j.get<std::int64_t>();
            if (v < std::numeric_limits<Int>::min() || v > std::numeric_limits<Int>::max()) {
                error(path, "integer out of range");
                return std::nullopt;
            }
            return static_cast<Int>(v);
        }
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            error(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<bool> boolean(const json& j, const std::string& path) {
        if (!j.is_boolean()) {
            error(path, "expected true or false");
            return std::nullopt;
        }
        return j.get<bool>();
    }

    template <class T, class Fn>
    void optional_field(const json& obj, std::string_view key, const std::string& path, T& slot, Fn&& read) {
        auto it = obj.find(std::string(key));
        if (it == obj.end()) return;
        if (auto v = read(*it, join(path, key))) slot = *v;
    }

    template <class T, class Fn>
    void required_field(const json& obj, std::string_view key, const std::string& path, T& slot, Fn&& read) {
        auto it = obj.find(std::string(key));
        if (it == obj.end()) {
            error(join(path, key), "missing required field");
            return;
        }
        if (auto v = read(*it, join(path, key))) slot = *v;
    }

    std::optional<Distribution> distribution(const json& j, const std::string& path) {
        if (j.is_number()) return Constant{j.get<double>()};
        if (!expect_object(j, path, {"constant", "uniform", "trunc_normal"})) return std::nullopt;
        if (j.size() != 1) {
            error(path, "expected exactly one of constant, uniform, trunc_normal");
            return std::nullopt;
        }
        if (j.contains("constant")) {
            if (auto v = number(j["constant"], path + ".constant")) return Constant{*v};
            return std::nullopt;
        }
        if (j.contains("uniform")) {
            const auto& u = j["uniform"];
            const std::string p = path + ".uniform";
            if (!expect_object(u, p, {"lo", "hi"})) return std::nullopt;
            Uniform out;
            const std::size_t before = errors.size();
            required_field(u, "lo", p, out.lo, [&](const json& v, const std::string& q) { return number(v, q); });
            required_field(u, "hi", p, out.hi, [&](const json& v, const std::string& q) { return number(v, q); });
            if (errors.size() != before) return std::nullopt;
            return out;
        }
        const auto& t = j["trunc_normal"];
        const std::string p = path + ".trunc_normal";
        if (!expect_object(t, p, {"mean", "sd", "lo", "hi"})) return std::nullopt;
        TruncNormal out;
        const std::size_t before = errors.size();
        auto num = [&](const json& v, const std::string& q) { return number(v, q); };
        auto ext = [&](const json& v, const std::string& q) { return extended(v, q); };
        required_field(t, "mean", p, out.mean, num);
        required_field(t, "sd", p, out.sd, num);
        optional_field(t, "lo", p, out.lo, ext);
        optional_field(t, "hi", p, out.hi, ext);
        if (errors.size() != before) return std::nullopt;
        return out;
    }

    std::optional<PopulationGroup> group(const json& j, const std::string& path) {
        if (!expect_object(j, path, {"label", "count", "x", "factors"})) return std::nullopt;
        PopulationGroup g;
        required_field(j, "label", path, g.label, [&](const json& v, const std::string& q) { return string(v, q); });
        required_field(j, "count", path, g.count,
                       [&](const json& v, const std::string& q) { return integer<std::size_t>(v, q); });
        required_field(j, "x", path, g.private_type, [&](const json& v, const std::string& q) -> std::optional<PrivateType> {
            auto s = string(v, q);
            if (!s) return std::nullopt;
            if (*s == "pro_rebellion") return PrivateType::ProRebellion;
            if (*s == "pro_status_quo") return PrivateType::ProStatusQuo;
            error(q, "expected \"pro_rebellion\" or \"pro_status_quo\"");
            return std::nullopt;
        });
        auto it = j.find("factors");
        if (it != j.end()) {
            const std::string p = join(path, "factors");
            if (expect_object(*it, p, {"F", "S", "A_U", "A_R", "c", "C", "V_R", "V_U", "V_NJ", "p_base"})) {
                auto dist = [&](const json& v, const std::string& q) { return distribution(v, q); };
                auto& f = g.factors;
                optional_field(*it, "F", p, f.F, dist);
                optional_field(*it, "S", p, f.S, dist);
                optional_field(*it, "A_U", p, f.A_U, dist);
                optional_field(*it, "A_R", p, f.A_R, dist);
                optional_field(*it, "c", p, f.c, dist);
                optional_field(*it, "C", p, f.C, dist);
                optional_field(*it, "V_R", p, f.V_R, dist);
                optional_field(*it, "V_U", p, f.V_U, dist);
                optional_field(*it, "V_NJ", p, f.V_NJ, dist);
                optional_field(*it, "p_base", p, f.p_base, dist);
            }
        }
        return g;
    }

    std::optional<NetworkSpec> network(const json& j, const std::string& path) {
        if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
            error(path, "expected an object with a string \"kind\"");
            return std::nullopt;
        }
        const auto kind = j["kind"].get<std::string>();
        auto num = [&](const json& v, const std::string& q) { return number(v, q); };
        if (kind == "complete") {
            expect_object(j, path, {"kind"});
            return CompleteGraph{};
        }
        if (kind == "erdos_renyi") {
            expect_object(j, path, {"kind", "p_edge"});
            ErdosRenyi er;
            required_field(j, "p_edge", path, er.p_edge, num);
            return er;
        }
        if (kind == "small_world") {
            expect_object(j, path, {"kind", "k", "rewire_p"});
            SmallWorld sw;
            required_field(j, "k", path, sw.k, [&](const json& v, const std::string& q) { return integer<std::size_t>(v, q); });
            required_field(j, "rewire_p", path, sw.rewire_p, num);
            return sw;
        }
        if (kind == "explicit") {
            expect_object(j, path, {"kind", "edges"});
            ExplicitNetwork ex;
            auto it = j.find("edges");
            if (it == j.end() || !it->is_array()) {
                error(join(path, "edges"), "expected an array of [source, target, weight]");
                return ex;
            }
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& e = (*it)[i];
                const std::string q = join(path, "edges") + "[" + std::to_string(i) + "]";
                if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
                    error(q, "expected [source, target] or [source, target, weight]");
                    continue;
                }
                auto src = integer<std::size_t>(e[0], q + "[0]");
                auto dst = integer<std::size_t>(e[1], q + "[1]");
                std::optional<double> w = 1.0;
                if (e.size() == 3) w = number(e[2], q + "[2]");
                if (src && dst && w) ex.edges.push_back({*src, *dst, *w});
            }
            return ex;
        }
        error(join(path, "kind"), "unknown network kind \"" + kind + "\"");
        return std::nullopt;
    }

    std::optional<ReputationSpec> reputation(const json& j, const std::string& path) {
        if (!expect_object(j, path, {"variant", "alpha", "centered", "damping", "tol", "max_iters"})) return std::nullopt;
        ReputationSpec r;
        optional_field(j, "variant", path, r.variant,
                       [&](const json& v, const std::string& q) -> std::optional<ReputationVariant> {
                           auto s = string(v, q);
                           if (!s) return std::nullopt;
                           if (*s == "unweighted_fraction") return ReputationVariant::UnweightedFraction;
                           if (*s == "weighted_fraction") return ReputationVariant::WeightedFraction;
                           if (*s == "iterative_influence") return ReputationVariant::IterativeInfluence;
                           error(q, "unknown reputation variant \"" + *s + "\"");
                           return std::nullopt;
                       });
        auto num = [&](const json& v, const std::string& q) { return number(v, q); };
        optional_field(j, "alpha", path, r.alpha, num);
        optional_field(j, "centered", path, r.centered, [&](const json& v, const std::string& q) { return boolean(v, q); });
        if (r.variant != ReputationVariant::IterativeInfluence) {
            for (auto key : {"damping", "tol", "max_iters"}) {
                if (j.contains(key)) error(join(path, key), "only allowed with variant iterative_influence");
            }
        } else {
            optional_field(j, "damping", path, r.damping, num);
            optional_field(j, "tol", path, r.tol, num);
            optional_field(j, "max_iters", path, r.max_iters,
                           [&](const json& v, const std::string& q) { return integer<int>(v, q); });
        }
        return r;
    }

    std::optional<IntegritySpec> integrity(const json& j, const std::string& path) {
        if (!expect_object(j, path, {"nu_match", "nu0", "kappa", "cap"})) return std::nullopt;
        IntegritySpec s;
        auto num = [&](const json& v, const std::string& q) { return number(v, q); };
        optional_field(j, "nu_match", path, s.consistency_bonus, num);
        optional_field(j, "nu0", path, s.initial_falsification_cost, num);
        optional_field(j, "kappa", path, s.falsification_growth, num);
        optional_field(j, "cap", path, s.falsification_cap, num);
        return s;
    }

    std::optional<std::optional<ExitRule>> exit_rule(const json& j, const std::string& path) {
        if (j.is_null()) return std::optional<ExitRule>{};
        if (!expect_object(j, path, {"threshold", "patience"})) return std::nullopt;
        ExitRule rule;
        required_field(j, "threshold", path, rule.threshold, [&](const json& v, const std::string& q) { return number(v, q); });
        required_field(j, "patience", path, rule.patience, [&](const json& v, const std::string& q) { return integer<int>(v, q); });
        return std::optional<ExitRule>{rule};
    }

    std::optional<Event> event(const json& j, const std::string& path) {
        if (!expect_object(j, path, {"step", "label", "deltas"})) return std::nullopt;
        Event e;
        required_field(j, "step", path, e.step, [&](const json& v, const std::string& q) { return integer<int>(v, q); });
        required_field(j, "label", path, e.label, [&](const json& v, const std::string& q) { return string(v, q); });
        auto it = j.find("deltas");
        if (it != j.end()) {
            const std::string p = join(path, "deltas");
            if (expect_object(*it, p, {"dF", "dS", "dC", "dc", "dA_U", "dA_R", "dp"})) {
                auto num = [&](const json& v, const std::string& q) { return number(v, q); };
                auto& d = e.deltas;
                optional_field(*it, "dF", p, d.freedom, num);
                optional_field(*it, "dS", p, d.status_quo, num);
                optional_field(*it, "dC", p, d.oppose_cost, num);
                optional_field(*it, "dc", p, d.abstain_cost, num);
                optional_field(*it, "dA_U", p, d.arrest_cost, num);
                optional_field(*it, "dA_R", p, d.reprisal_cost, num);
                optional_field(*it, "dp", p, d.success_belief, num);
            }
        }
        return e;
    }

    Scenario scenario(const json& j) {
        Scenario s;
        if (!expect_object(j, "", {"name", "seed", "horizon", "beta_share", "update", "population", "network",
                                   "reputation", "integrity", "exit", "events"})) {
            return s;
        }
        optional_field(j, "name", "", s.name, [&](const json& v, const std::string& q) { return string(v, q); });
        required_field(j, "seed", "", s.seed, [&](const json& v, const std::string& q) { return integer<std::uint64_t>(v, q); });
        required_field(j, "horizon", "", s.horizon, [&](const json& v, const std::string& q) { return integer<int>(v, q); });
        optional_field(j, "beta_share", "", s.beta_share, [&](const json& v, const std::string& q) { return number(v, q); });
        optional_field(j, "update", "", s.update, [&](const json& v, const std::string& q) -> std::optional<UpdateRule> {
            auto str = string(v, q);
            if (str && *str == "synchronous") return UpdateRule::Synchronous;
            if (str) error(q, "only \"synchronous\" is supported");
            return std::nullopt;
        });

        auto pop = j.find("population");
        if (pop == j.end()) {
            error("population", "missing required field");
        } else if (expect_object(*pop, "population", {"groups"})) {
            auto groups = pop->find("groups");
            if (groups == pop->end() || !groups->is_array()) {
                error("population.groups", "expected an array");
            } else {
                for (std::size_t i = 0; i < groups->size(); ++i) {
                    if (auto g = group((*groups)[i], "population.groups[" + std::to_string(i) + "]")) {
                        s.population.groups.push_back(std::move(*g));
                    }
                }
            }
        }
        required_field(j, "network", "", s.network, [&](const json& v, const std::string& q) { return network(v, q); });
        optional_field(j, "reputation", "", s.reputation, [&](const json& v, const std::string& q) { return reputation(v, q); });
        optional_field(j, "integrity", "", s.integrity, [&](const json& v, const std::string& q) { return integrity(v, q); });
        optional_field(j, "exit", "", s.exit, [&](const json& v, const std::string& q) { return exit_rule(v, q); });

        auto events = j.find("events");
        if (events != j.end()) {
            if (!events->is_array()) {
                error("events", "expected an array");
            } else {
                for (std::size_t i = 0; i < events->size(); ++i) {
                    if (auto e = event((*events)[i], "events[" + std::to_string(i) + "]")) s.events.push_back(std::move(*e));
                }
            }
        }
        return s;
    }
};

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline json distribution_to_json(const Distribution& d) {
    auto ext = [](double v) -> json {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        return v;
    };
    if (const auto* c = std::get_if<Constant>(&d)) return json{{"constant", c->value}};
    if (const auto* u = std::get_if<Uniform>(&d)) return json{{"uniform", {{"lo", u->lo}, {"hi", u->hi}}}};
    const auto& t = std::get<TruncNormal>(d);
    return json{{"trunc_normal", {{"mean", t.mean}, {"sd", t.sd}, {"lo", ext(t.lo)}, {"hi", ext(t.hi)}}}};
}

} // namespace detail

/// Parses the document without semantic validation. Throws ParseError on
/// malformed JSON and ValidationError on schema violations.
inline nlohmann::json parse_json_document(std::string_view text) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = detail::line_and_column(text, e.byte);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what(),
                         line, column);
    }
}

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    detail::Reader reader;
    Scenario s = reader.scenario(doc);
    auto problems = std::move(reader.errors);
    if (problems.empty()) problems = validate_scenario(s);
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return s;
}

/// Strict parse plus full validation.
inline Scenario parse_scenario(std::string_view text) {
    return scenario_from_json(parse_json_document(text));
}

/// Canonical document: every field spelled out, defaults included.
inline nlohmann::json scenario_to_json(const Scenario& s) {
    using nlohmann::json;
    json groups = json::array();
    for (const auto& g : s.population.groups) {
        const auto& f = g.factors;
        groups.push_back({{"label", g.label},
                          {"count", g.count},
                          {"x", std::string(to_string(g.private_type))},
                          {"factors",
                           {{"F", detail::distribution_to_json(f.F)},
                            {"S", detail::distribution_to_json(f.S)},
                            {"A_U", detail::distribution_to_json(f.A_U)},
                            {"A_R", detail::distribution_to_json(f.A_R)},
                            {"c", detail::distribution_to_json(f.c)},
                            {"C", detail::distribution_to_json(f.C)},
                            {"V_R", detail::distribution_to_json(f.V_R)},
                            {"V_U", detail::distribution_to_json(f.V_U)},
                            {"V_NJ", detail::distribution_to_json(f.V_NJ)},
                            {"p_base", detail::distribution_to_json(f.p_base)}}}});
    }

    json network;
    if (std::holds_alternative<CompleteGraph>(s.network)) {
        network = {{"kind", "complete"}};
    } else if (const auto* er = std::get_if<ErdosRenyi>(&s.network)) {
        network = {{"kind", "erdos_renyi"}, {"p_edge", er->p_edge}};
    } else if (const auto* sw = std::get_if<SmallWorld>(&s.network)) {
        network = {{"kind", "small_world"}, {"k", sw->k}, {"rewire_p", sw->rewire_p}};
    } else {
        json edges = json::array();
        for (const auto& e : std::get<ExplicitNetwork>(s.network).edges) edges.push_back({e.source, e.target, e.weight});
        network = {{"kind", "explicit"}, {"edges", edges}};
    }

    const auto& r = s.reputation;
    json reputation = {{"variant", r.variant == ReputationVariant::UnweightedFraction ? "unweighted_fraction"
                                   : r.variant == ReputationVariant::WeightedFraction ? "weighted_fraction"
                                                                                      : "iterative_influence"},
                       {"alpha", r.alpha},
                       {"centered", r.centered}};
    if (r.variant == ReputationVariant::IterativeInfluence) {
        reputation["damping"] = r.damping;
        reputation["tol"] = r.tol;
        reputation["max_iters"] = r.max_iters;
    }

    json events = json::array();
    for (const auto& e : s.events) {
        const auto& d = e.deltas;
        events.push_back({{"step", e.step},
                          {"label", e.label},
                          {"deltas",
                           {{"dF", d.freedom},
                            {"dS", d.status_quo},
                            {"dC", d.oppose_cost},
                            {"dc", d.abstain_cost},
                            {"dA_U", d.arrest_cost},
                            {"dA_R", d.reprisal_cost},
                            {"dp", d.success_belief}}}});
    }

    json exit = nullptr;
    if (s.exit) exit = {{"threshold", s.exit->threshold}, {"patience", s.exit->patience}};

    return {{"name", s.name},
            {"seed", s.seed},
            {"horizon", s.horizon},
            {"beta_share", s.beta_share},
            {"update", "synchronous"},
            {"population", {{"groups", groups}}},
            {"network", network},
            {"reputation", reputation},
            {"integrity",
             {{"nu_match", s.integrity.consistency_bonus},
              {"nu0", s.integrity.initial_falsification_cost},
              {"kappa", s.integrity.falsification_growth},
              {"cap", s.integrity.falsification_cap}}},
            {"exit", exit},
            {"events", events}};
}

inline std::string serialize_scenario(const Scenario& s) {
    return scenario_to_json(s).dump(2) + "\n";
}

} // namespace pfsim
