// dynamics.hpp - environment offsets, events, integrity drift, exit flow and
// the synchronous step.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfsim/model.hpp"
#include "pfsim/reputation.hpp"

namespace pfsim {

/// Value of public-private consistency and the growing, bounded cost of
/// falsifying.
struct IntegritySpec {
    double consistency_bonus = 0.0;         // nu_match
    double initial_falsification_cost = 0.0; // nu0
    double falsification_growth = 0.0;       // kappa, per step of falsification
    double falsification_cap = 1.0;          // cap

    friend bool operator==(const IntegritySpec&, const IntegritySpec&) = default;
};

inline std::vector<std::string> check_integrity(const IntegritySpec& s) {
    std::vector<std::string> out;
    auto nonneg = [&](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) out.push_back(std::string("integrity.") + name + " >= 0 violated");
    };
    nonneg(s.consistency_bonus, "nu_match");
    nonneg(s.initial_falsification_cost, "nu0");
    nonneg(s.falsification_growth, "kappa");
    if (!std::isfinite(s.falsification_cap) || s.falsification_cap <= 0.0) out.push_back("integrity.cap > 0 violated");
    else if (s.initial_falsification_cost > s.falsification_cap) out.push_back("integrity.nu0 <= cap violated");
    return out;
}

/// Additive changes to the factor offsets. Also used as an event's delta set.
struct FactorOffsets {
    double freedom = 0.0;        // dF
    double status_quo = 0.0;     // dS
    double oppose_cost = 0.0;    // dC
    double abstain_cost = 0.0;   // dc
    double arrest_cost = 0.0;    // dA_U
    double reprisal_cost = 0.0;  // dA_R
    double success_belief = 0.0; // dp

    FactorOffsets& operator+=(const FactorOffsets& o) {
        freedom += o.freedom;
        status_quo += o.status_quo;
        oppose_cost += o.oppose_cost;
        abstain_cost += o.abstain_cost;
        arrest_cost += o.arrest_cost;
        reprisal_cost += o.reprisal_cost;
        success_belief += o.success_belief;
        return *this;
    }

    bool all_finite() const {
        return std::isfinite(freedom) && std::isfinite(status_quo) && std::isfinite(oppose_cost) &&
               std::isfinite(abstain_cost) && std::isfinite(arrest_cost) && std::isfinite(reprisal_cost) &&
               std::isfinite(success_belief);
    }

    friend bool operator==(const FactorOffsets&, const FactorOffsets&) = default;
};

struct Environment {
    FactorOffsets offsets;
    double share_feedback = 0.0; // beta_share: weight of last step's public R share in p

    friend bool operator==(const Environment&, const Environment&) = default;
};

struct Event {
    int step = 0;
    std::string label;
    FactorOffsets deltas;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Sustained-misery flight rule. Absent means exit is disabled.
struct ExitRule {
    double threshold = -std::numeric_limits<double>::infinity();
    int patience = 1;

    friend bool operator==(const ExitRule&, const ExitRule&) = default;
};

struct AgentState {
    AgentId id = 0;
    AgentParams params;
    Position position = Position::NJ;
    int falsify_streak = 0;
    bool exited = false;
    int low_payoff_streak = 0;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct SimState {
    int t = 0;
    std::vector<AgentState> agents;
    Environment env;
};

/// One step's population summary. Shares are over agents still present.
struct StepRecord {
    int t = 0;
    double share_R = 0.0;
    double share_U = 0.0;
    double share_NJ = 0.0;
    std::size_t n_exited = 0;
    std::size_t n_falsifying = 0;
    std::size_t n_falsifying_status_quo = 0; // pro-status-quo privates only
    double mean_p = 0.0;
    std::vector<std::string> events;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Base factors shifted by the environment, clamped at zero where the factor
/// must stay nonnegative.
inline AgentParams effective_params(const AgentParams& base, const Environment& env) {
    const auto& o = env.offsets;
    AgentParams out = base;
    out.freedom_value = std::max(0.0, base.freedom_value + o.freedom);
    out.status_quo_value = std::max(0.0, base.status_quo_value + o.status_quo);
    out.oppose_cost = std::max(0.0, base.oppose_cost + o.oppose_cost);
    out.abstain_cost = std::max(0.0, base.abstain_cost + o.abstain_cost);
    out.arrest_cost = std::max(0.0, base.arrest_cost + o.arrest_cost);
    out.reprisal_cost = std::max(0.0, base.reprisal_cost + o.reprisal_cost);
    return out;
}

inline double perceived_probability(const AgentParams& params, double share_r_prev, const Environment& env) {
    const double p = params.base_success_belief + env.share_feedback * share_r_prev + env.offsets.success_belief;
    return std::clamp(p, 0.0, 1.0);
}

inline double integrity_value(const IntegritySpec& spec, Position y, PrivateType x, int falsify_streak) {
    if (is_consistent(y, x)) return spec.consistency_bonus;
    const double cost = spec.initial_falsification_cost + spec.falsification_growth * falsify_streak;
    return -std::min(spec.falsification_cap, cost);
}

/// Updates the low-payoff streak and flags the agent as exited once the
/// streak reaches the patience. A disabled rule never triggers.
inline AgentState check_exit(AgentState state, double best_payoff, const std::optional<ExitRule>& rule) {
    if (!rule || state.exited) return state;
    if (best_payoff < rule->threshold) ++state.low_payoff_streak;
    else state.low_payoff_streak = 0;
    if (state.low_payoff_streak >= rule->patience) state.exited = true;
    return state;
}

inline AgentState check_exit(AgentState state, double best_payoff, double exit_threshold, int exit_patience) {
    return check_exit(std::move(state), best_payoff, ExitRule{exit_threshold, exit_patience});
}

/// Adds the deltas of every event scheduled at `t`, in list order.
inline Environment apply_events(Environment env, std::span<const Event> events, int t) {
    for (const Event& e : events) {
        if (e.step == t) env.offsets += e.deltas;
    }
    return env;
}

inline std::vector<std::string> event_labels_at(std::span<const Event> events, int t) {
    std::vector<std::string> out;
    for (const Event& e : events) {
        if (e.step == t) out.push_back(e.label);
    }
    return out;
}

/// Everything a step reads besides the state itself.
struct StepContext {
    const ReputationModel& reputation;
    IntegritySpec integrity;
    std::optional<ExitRule> exit;
    std::span<const Event> events;
};

inline std::vector<std::optional<Position>> public_view(const SimState& state) {
    std::vector<std::optional<Position>> out(state.agents.size());
    for (const auto& a : state.agents) {
        if (!a.exited) out[a.id] = a.position;
    }
    return out;
}

/// Soft terms of every candidate position for one agent.
inline PositionMap<SoftTerms> soft_terms(const AgentState& agent, const ReputationModel& reputation,
                                         PublicView publics, const IntegritySpec& integrity) {
    PositionMap<SoftTerms> soft;
    for (Position y : kAllPositions) {
        soft[y].reputation = reputation(agent.id, y, publics);
        soft[y].integrity = integrity_value(integrity, y, agent.params.private_type, agent.falsify_streak);
    }
    return soft;
}

inline StepRecord summarize(const SimState& state, int t, double mean_p, std::vector<std::string> events) {
    StepRecord rec;
    rec.t = t;
    rec.mean_p = mean_p;
    rec.events = std::move(events);
    std::size_t present = 0;
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& a : state.agents) {
        if (a.exited) {
            ++rec.n_exited;
            continue;
        }
        ++present;
        ++counts[static_cast<std::size_t>(a.position)];
        if (!is_consistent(a.position, a.params.private_type)) {
            ++rec.n_falsifying;
            if (a.params.private_type == PrivateType::ProStatusQuo) ++rec.n_falsifying_status_quo;
        }
    }
    if (present > 0) {
        const double n = static_cast<double>(present);
        rec.share_NJ = static_cast<double>(counts[0]) / n;
        rec.share_U = static_cast<double>(counts[1]) / n;
        rec.share_R = static_cast<double>(counts[2]) / n;
    }
    return rec;
}

/// Advances the state by one synchronous step. Every decision reads only the
/// public positions left by the previous step.
inline StepRecord step(SimState& state, const StepContext& ctx) {
    const int t = state.t;
    state.env = apply_events(state.env, ctx.events, t);

    const auto publics = public_view(state);
    std::size_t present = 0;
    std::size_t rebels = 0;
    for (const auto& a : state.agents) {
        if (a.exited) continue;
        ++present;
        if (a.position == Position::R) ++rebels;
    }
    const double share_r_prev = present > 0 ? static_cast<double>(rebels) / static_cast<double>(present) : 0.0;

    std::vector<AgentState> next = state.agents;
    double p_sum = 0.0;
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        const AgentState& agent = state.agents[i];
        if (agent.exited) continue;
        const AgentParams eff = effective_params(agent.params, state.env);
        const double p = perceived_probability(eff, share_r_prev, state.env);
        p_sum += p;
        const auto values = payoffs(eff, p, soft_terms(agent, ctx.reputation, publics, ctx.integrity));
        const Position chosen = argmax_position(values, agent.position);

        AgentState& out = next[i];
        out.position = chosen;
        out.falsify_streak = is_consistent(chosen, agent.params.private_type) ? 0 : agent.falsify_streak + 1;
        out = check_exit(std::move(out), values[chosen], ctx.exit);
    }
    state.agents = std::move(next);
    state.t = t + 1;

    const double mean_p = present > 0 ? p_sum / static_cast<double>(present) : 0.0;
    return summarize(state, t, mean_p, event_labels_at(ctx.events, t));
}

} // namespace pfsim
