// model.hpp - agent factors, the three expected payoffs, the decision rule
// and the closed-form participation thresholds.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfsim/errors.hpp"

namespace pfsim {

/// Public stance. Enumerator order is the tie-break order (NJ, U, R).
enum class Position : std::uint8_t { NJ = 0, U = 1, R = 2 };

inline constexpr std::array<Position, 3> kAllPositions{Position::NJ, Position::U, Position::R};

enum class PrivateType : std::uint8_t { ProRebellion, ProStatusQuo };

inline constexpr std::string_view to_string(Position y) {
    switch (y) {
    case Position::NJ: return "NJ";
    case Position::U: return "U";
    case Position::R: return "R";
    }
    return "?";
}

inline constexpr std::string_view to_string(PrivateType x) {
    return x == PrivateType::ProRebellion ? "pro_rebellion" : "pro_status_quo";
}

/// True when the public stance matches the private preference. Abstaining
/// is never consistent.
inline constexpr bool is_consistent(Position y, PrivateType x) {
    return (y == Position::R && x == PrivateType::ProRebellion) ||
           (y == Position::U && x == PrivateType::ProStatusQuo);
}

/// Fixed-size table keyed by Position.
template <class T>
struct PositionMap {
    std::array<T, 3> values{};

    constexpr T& operator[](Position y) { return values[static_cast<std::size_t>(y)]; }
    constexpr const T& operator[](Position y) const { return values[static_cast<std::size_t>(y)]; }

    friend constexpr bool operator==(const PositionMap&, const PositionMap&) = default;
};

/// Contextual factors of one individual. Costs and values are in payoff units.
struct AgentParams {
    double freedom_value = 0.0;       // F: value of independence from the center
    double status_quo_value = 0.0;    // S: value of life under the status quo
    double arrest_cost = 0.0;         // A_U: cost if the status quo wins after rebelling
    double reprisal_cost = 0.0;       // A_R: cost if the rebellion wins after opposing it
    double abstain_cost = 0.0;        // c: inflicted by rebels for not joining
    double oppose_cost = 0.0;         // C: inflicted by rebels for opposing
    double violence_rebel = 0.0;      // V_R
    double violence_status_quo = 0.0; // V_U
    double violence_abstain = 0.0;    // V_NJ
    PrivateType private_type = PrivateType::ProRebellion;
    double base_success_belief = 0.0; // agent-specific part of p_R

    double violence(Position y) const {
        switch (y) {
        case Position::R: return violence_rebel;
        case Position::U: return violence_status_quo;
        case Position::NJ: return violence_abstain;
        }
        return 0.0;
    }

    friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// Reputation and integrity value of one candidate position.
struct SoftTerms {
    double reputation = 0.0;
    double integrity = 0.0;

    double total() const { return reputation + integrity; }

    friend bool operator==(const SoftTerms&, const SoftTerms&) = default;
};

/// Absolute tolerance under which two payoffs count as tied.
inline constexpr double kTieEpsilon = 1e-9;

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be finite");
}

inline void require_nonnegative(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) throw InvalidParameter(std::string(name) + " must be >= 0");
}

inline void require_probability(double p) {
    require_finite(p, "p");
    if (p < 0.0 || p > 1.0) throw InvalidParameter("p must lie in [0, 1]");
}

inline void require_finite(const SoftTerms& soft) {
    require_finite(soft.reputation, "reputation");
    require_finite(soft.integrity, "integrity");
}

// num / den with den >= 0; a zero denominator maps to a signed infinity and
// a zero numerator over zero to -inf (the first option weakly dominates).
inline double ratio_or_infinity(double numerator, double denominator) {
    if (denominator == 0.0) {
        return numerator > 0.0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    }
    return numerator / denominator;
}

} // namespace detail

/// Hard invariants of a parameter set. Returns human-readable violations; empty when valid.
inline std::vector<std::string> check_params(const AgentParams& a) {
    std::vector<std::string> out;
    auto nonneg = [&](double v, const char* name) {
        if (!std::isfinite(v)) out.push_back(std::string(name) + " must be finite");
        else if (v < 0.0) out.push_back(std::string(name) + " >= 0 violated");
    };
    nonneg(a.freedom_value, "F");
    nonneg(a.status_quo_value, "S");
    nonneg(a.arrest_cost, "A_U");
    nonneg(a.reprisal_cost, "A_R");
    nonneg(a.abstain_cost, "c");
    nonneg(a.oppose_cost, "C");
    for (auto [v, name] : {std::pair{a.violence_rebel, "V_R"}, std::pair{a.violence_status_quo, "V_U"},
                           std::pair{a.violence_abstain, "V_NJ"}}) {
        if (!std::isfinite(v)) out.push_back(std::string(name) + " must be finite");
    }
    if (!(a.base_success_belief >= 0.0 && a.base_success_belief <= 1.0)) {
        out.push_back("p_base in [0, 1] violated");
    }
    if (a.oppose_cost < a.abstain_cost) out.push_back("C >= c violated");
    return out;
}

inline void validate(const AgentParams& a) {
    auto problems = check_params(a);
    if (!problems.empty()) throw InvalidParameter(problems.front());
}

/// E(R) = p F - (1 - p) A_U + R(y) + N(y|x) + V_R
inline double payoff_rebel(double freedom, double arrest, double p, SoftTerms soft, double violence) {
    detail::require_nonnegative(freedom, "F");
    detail::require_nonnegative(arrest, "A_U");
    detail::require_probability(p);
    detail::require_finite(soft);
    detail::require_finite(violence, "V_R");
    return p * freedom - (1.0 - p) * arrest + soft.reputation + soft.integrity + violence;
}

/// E(U) = S (1 - p) - A_R p - C + R(y) + N(y|x) + V_U
inline double payoff_statusquo(double status_quo, double reprisal, double oppose, double p, SoftTerms soft,
                               double violence) {
    detail::require_nonnegative(status_quo, "S");
    detail::require_nonnegative(reprisal, "A_R");
    detail::require_nonnegative(oppose, "C");
    detail::require_probability(p);
    detail::require_finite(soft);
    detail::require_finite(violence, "V_U");
    return status_quo * (1.0 - p) - reprisal * p - oppose + soft.reputation + soft.integrity + violence;
}

/// E(NJ) = S (1 - p) - c + R(y) + N(y|x) + V_NJ
inline double payoff_nojoin(double status_quo, double abstain, double p, SoftTerms soft, double violence) {
    detail::require_nonnegative(status_quo, "S");
    detail::require_nonnegative(abstain, "c");
    detail::require_probability(p);
    detail::require_finite(soft);
    detail::require_finite(violence, "V_NJ");
    return status_quo * (1.0 - p) - abstain + soft.reputation + soft.integrity + violence;
}

inline double payoff(const AgentParams& a, Position y, double p, SoftTerms soft) {
    switch (y) {
    case Position::R: return payoff_rebel(a.freedom_value, a.arrest_cost, p, soft, a.violence_rebel);
    case Position::U:
        return payoff_statusquo(a.status_quo_value, a.reprisal_cost, a.oppose_cost, p, soft,
                                a.violence_status_quo);
    case Position::NJ: return payoff_nojoin(a.status_quo_value, a.abstain_cost, p, soft, a.violence_abstain);
    }
    return 0.0;
}

inline PositionMap<double> payoffs(const AgentParams& a, double p, const PositionMap<SoftTerms>& soft) {
    PositionMap<double> out;
    for (Position y : kAllPositions) out[y] = payoff(a, y, p, soft[y]);
    return out;
}

/// Argmax with ties (within kTieEpsilon of the maximum) resolved to `previous`,
/// then NJ, then the earliest of (NJ, U, R).
inline Position argmax_position(const PositionMap<double>& values, Position previous) {
    double best = values[Position::NJ];
    for (Position y : kAllPositions) best = std::max(best, values[y]);
    auto tied = [&](Position y) { return values[y] >= best - kTieEpsilon; };
    if (tied(previous)) return previous;
    for (Position y : kAllPositions) {
        if (tied(y)) return y;
    }
    return Position::NJ;
}

inline Position decide(const AgentParams& params, double p, const PositionMap<SoftTerms>& soft, Position previous) {
    return argmax_position(payoffs(params, p, soft), previous);
}

/// p* above which abstaining beats opposing the rebellion.
inline double threshold_nj_over_u(const AgentParams& a, SoftTerms soft_nj, SoftTerms soft_u) {
    const double numerator = a.abstain_cost - a.oppose_cost - soft_nj.reputation + soft_u.reputation -
                             soft_nj.integrity + soft_u.integrity - a.violence_abstain + a.violence_status_quo;
    return detail::ratio_or_infinity(numerator, a.reprisal_cost);
}

/// p* above which rebelling beats abstaining.
inline double threshold_r_over_nj(const AgentParams& a, SoftTerms soft_r, SoftTerms soft_nj) {
    const double numerator = a.status_quo_value - a.abstain_cost + a.arrest_cost + soft_nj.reputation -
                             soft_r.reputation + soft_nj.integrity - soft_r.integrity + a.violence_abstain -
                             a.violence_rebel;
    const double denominator = a.freedom_value + a.status_quo_value + a.arrest_cost;
    return detail::ratio_or_infinity(numerator, denominator);
}

} // namespace pfsim
