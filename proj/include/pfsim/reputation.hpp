// reputation.hpp - respect network, reputation variants, influence scores,
// public sentiment and network generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pfsim/errors.hpp"
#include "pfsim/model.hpp"
#include "pfsim/rng.hpp"

namespace pfsim {

using AgentId = std::size_t;

/// `source` respects the opinion of `target` with `weight`.
struct Edge {
    AgentId source = 0;
    AgentId target = 0;
    double weight = 1.0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed weighted respect graph in compressed-row form.
class SocialNetwork {
public:
    struct Neighbor {
        AgentId id;
        double weight;
    };

    SocialNetwork() = default;

    SocialNetwork(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        for (const Edge& e : edges_) {
            if (e.source >= n_ || e.target >= n_) throw InvalidParameter("edge endpoint out of range");
            if (e.source == e.target) throw InvalidParameter("self-loop on agent " + std::to_string(e.source));
            if (!std::isfinite(e.weight) || e.weight < 0.0) throw InvalidParameter("edge weight must be finite and >= 0");
        }
        offsets_.assign(n_ + 1, 0);
        for (const Edge& e : edges_) ++offsets_[e.source + 1];
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adjacency_.resize(edges_.size());
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const Edge& e : edges_) adjacency_[cursor[e.source]++] = Neighbor{e.target, e.weight};
        out_weight_.assign(n_, 0.0);
        for (const Edge& e : edges_) out_weight_[e.source] += e.weight;
    }

    std::size_t size() const noexcept { return n_; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::span<const Neighbor> out_neighbors(AgentId agent) const {
        if (agent >= n_) throw NotFound("unknown agent id " + std::to_string(agent));
        return std::span<const Neighbor>(adjacency_).subspan(offsets_[agent], offsets_[agent + 1] - offsets_[agent]);
    }

    double out_weight(AgentId agent) const { return out_weight_.at(agent); }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
    std::vector<double> out_weight_;
};

enum class ReputationVariant { UnweightedFraction, WeightedFraction, IterativeInfluence };

struct ReputationSpec {
    ReputationVariant variant = ReputationVariant::WeightedFraction;
    double alpha = 1.0;
    bool centered = true;
    // Used by IterativeInfluence only.
    double damping = 0.85;
    double tol = 1e-12;
    int max_iters = 200;

    friend bool operator==(const ReputationSpec&, const ReputationSpec&) = default;
};

/// Public positions indexed by agent id; nullopt marks an exited agent.
using PublicView = std::span<const std::optional<Position>>;

namespace detail {

// alpha * frac or alpha * (frac - 1/2); 0 when the neighbourhood carries no weight.
template <class WeightFn>
double neighborhood_reputation(AgentId agent, Position position, const SocialNetwork& network, PublicView publics,
                               const ReputationSpec& spec, WeightFn&& weight_of) {
    double support = 0.0;
    double total = 0.0;
    for (const auto& nb : network.out_neighbors(agent)) {
        if (nb.id >= publics.size() || !publics[nb.id]) continue;
        const double w = weight_of(nb);
        total += w;
        if (*publics[nb.id] == position) support += w;
    }
    if (total <= 0.0) return 0.0;
    const double frac = support / total;
    return spec.centered ? spec.alpha * (frac - 0.5) : spec.alpha * frac;
}

} // namespace detail

/// R(y) as the (weighted) share of respected neighbours publicly holding `position`.
inline double reputation_fraction(AgentId agent, Position position, const SocialNetwork& network,
                                  PublicView publics, const ReputationSpec& spec) {
    if (spec.variant == ReputationVariant::IterativeInfluence) {
        throw InvalidParameter("reputation_fraction needs a fraction variant");
    }
    const bool weighted = spec.variant == ReputationVariant::WeightedFraction;
    return detail::neighborhood_reputation(agent, position, network, publics, spec,
                                           [weighted](const SocialNetwork::Neighbor& nb) {
                                               return weighted ? nb.weight : 1.0;
                                           });
}

/// Stationary scores of the damped random surfer on the respect graph.
/// Out-weights are row-normalised; rows with no out-weight spread uniformly.
inline std::vector<double> influence_scores(const SocialNetwork& network, double damping = 0.85, double tol = 1e-12,
                                            int max_iters = 200) {
    const std::size_t n = network.size();
    if (n == 0) throw InvalidParameter("influence_scores needs at least one agent");
    if (!(damping > 0.0 && damping < 1.0)) throw InvalidParameter("damping must lie in (0, 1)");
    if (!(tol > 0.0)) throw InvalidParameter("tol must be > 0");
    if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> scores(n, inv_n);
    std::vector<double> next(n);
    double residual = 0.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        double dangling = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        for (AgentId u = 0; u < n; ++u) {
            const double w = network.out_weight(u);
            if (w <= 0.0) {
                dangling += scores[u];
                continue;
            }
            for (const auto& nb : network.out_neighbors(u)) next[nb.id] += scores[u] * nb.weight / w;
        }
        const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
        residual = 0.0;
        for (AgentId v = 0; v < n; ++v) {
            next[v] = base + damping * next[v];
            residual += std::abs(next[v] - scores[v]);
        }
        scores.swap(next);
        if (residual < tol) return scores;
    }
    throw ConvergenceError("influence scores did not converge in " + std::to_string(max_iters) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           scores, residual);
}

/// Weighted fraction with each neighbour's weight scaled by its influence score.
inline double reputation_iterative(AgentId agent, Position position, const SocialNetwork& network,
                                   PublicView publics, const ReputationSpec& spec, std::span<const double> scores) {
    if (scores.size() != network.size()) throw InvalidParameter("score vector does not match network size");
    return detail::neighborhood_reputation(agent, position, network, publics, spec,
                                           [scores](const SocialNetwork::Neighbor& nb) {
                                               return nb.weight * scores[nb.id];
                                           });
}

inline double reputation_iterative(AgentId agent, Position position, const SocialNetwork& network,
                                   PublicView publics, const ReputationSpec& spec) {
    if (spec.variant != ReputationVariant::IterativeInfluence) {
        throw InvalidParameter("reputation_iterative needs the iterative variant");
    }
    const auto scores = influence_scores(network, spec.damping, spec.tol, spec.max_iters);
    return reputation_iterative(agent, position, network, publics, spec, scores);
}

/// Reputation over a fixed network with the influence scores computed once.
class ReputationModel {
public:
    ReputationModel(const SocialNetwork& network, ReputationSpec spec) : network_(&network), spec_(spec) {
        if (spec_.variant == ReputationVariant::IterativeInfluence) {
            scores_ = influence_scores(network, spec_.damping, spec_.tol, spec_.max_iters);
        }
    }

    double operator()(AgentId agent, Position position, PublicView publics) const {
        if (spec_.variant == ReputationVariant::IterativeInfluence) {
            return reputation_iterative(agent, position, *network_, publics, spec_, scores_);
        }
        return reputation_fraction(agent, position, *network_, publics, spec_);
    }

    PositionMap<double> all(AgentId agent, PublicView publics) const {
        PositionMap<double> out;
        for (Position y : kAllPositions) out[y] = (*this)(agent, y, publics);
        return out;
    }

    const ReputationSpec& spec() const noexcept { return spec_; }
    const SocialNetwork& network() const noexcept { return *network_; }

private:
    const SocialNetwork* network_;
    ReputationSpec spec_;
    std::vector<double> scores_;
};

inline constexpr double numeric_position(Position y) {
    switch (y) {
    case Position::R: return 1.0;
    case Position::U: return -1.0;
    case Position::NJ: return 0.0;
    }
    return 0.0;
}

/// Weighted mean of +1 (R), -1 (U), 0 (NJ) over agents that are still present.
inline double public_sentiment(PublicView publics, std::span<const double> weights) {
    if (weights.size() != publics.size()) throw InvalidParameter("weights and publics differ in length");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < publics.size(); ++i) {
        if (!publics[i]) continue;
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) throw InvalidParameter("weights must be finite and >= 0");
        num += weights[i] * numeric_position(*publics[i]);
        den += weights[i];
    }
    if (!(den > 0.0)) throw InvalidParameter("public_sentiment needs positive total weight");
    return num / den;
}

struct CompleteGraph {
    friend bool operator==(const CompleteGraph&, const CompleteGraph&) = default;
};
struct ErdosRenyi {
    double p_edge = 0.0;
    friend bool operator==(const ErdosRenyi&, const ErdosRenyi&) = default;
};
struct SmallWorld {
    std::size_t k = 2;
    double rewire_p = 0.0;
    friend bool operator==(const SmallWorld&, const SmallWorld&) = default;
};

using NetworkKind = std::variant<CompleteGraph, ErdosRenyi, SmallWorld>;

/// Deterministic unit-weight network for (kind, n, seed).
inline SocialNetwork generate_network(const NetworkKind& kind, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("network needs n >= 1");
    Rng rng = make_rng(seed, RngStream::Network);
    std::vector<Edge> edges;

    if (std::holds_alternative<CompleteGraph>(kind)) {
        edges.reserve(n * (n - 1));
        for (AgentId u = 0; u < n; ++u)
            for (AgentId v = 0; v < n; ++v)
                if (u != v) edges.push_back({u, v, 1.0});
    } else if (const auto* er = std::get_if<ErdosRenyi>(&kind)) {
        if (!(er->p_edge >= 0.0 && er->p_edge <= 1.0)) throw InvalidParameter("p_edge must lie in [0, 1]");
        for (AgentId u = 0; u < n; ++u)
            for (AgentId v = 0; v < n; ++v)
                if (u != v && uniform01(rng) < er->p_edge) edges.push_back({u, v, 1.0});
    } else {
        const auto& sw = std::get<SmallWorld>(kind);
        if (sw.k % 2 != 0) throw InvalidParameter("small-world k must be even");
        if (sw.k >= n) throw InvalidParameter("small-world k must be < n");
        if (!(sw.rewire_p >= 0.0 && sw.rewire_p <= 1.0)) throw InvalidParameter("rewire_p must lie in [0, 1]");

        // Ring lattice, then rewire each lattice edge's far end with probability rewire_p.
        std::vector<std::set<AgentId>> adj(n);
        for (AgentId u = 0; u < n; ++u) {
            for (std::size_t j = 1; j <= sw.k / 2; ++j) {
                const AgentId v = (u + j) % n;
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
        for (std::size_t j = 1; j <= sw.k / 2; ++j) {
            for (AgentId u = 0; u < n; ++u) {
                const AgentId v = (u + j) % n;
                if (uniform01(rng) >= sw.rewire_p) continue;
                if (adj[u].size() >= n - 1) continue;
                AgentId w = uniform_index(rng, n);
                while (w == u || adj[u].count(w) != 0) w = uniform_index(rng, n);
                adj[u].erase(v);
                adj[v].erase(u);
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        for (AgentId u = 0; u < n; ++u)
            for (AgentId v : adj[u]) edges.push_back({u, v, 1.0});
    }
    return SocialNetwork(n, std::move(edges));
}

} // namespace pfsim
