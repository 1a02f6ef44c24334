// analysis.hpp - first movers, threshold-cascade equilibria, falsification
// series and SVG time-series rendering.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pfsim/dynamics.hpp"
#include "pfsim/errors.hpp"
#include "pfsim/model.hpp"
#include "pfsim/reputation.hpp"

namespace pfsim {

/// Reputation of every position for every agent when nobody has yet taken a
/// public side (all agents NJ), which is the state at t = 0.
inline std::vector<PositionMap<double>> zero_support_reputation(const ReputationModel& reputation) {
    const std::size_t n = reputation.network().size();
    const std::vector<std::optional<Position>> publics(n, Position::NJ);
    std::vector<PositionMap<double>> out(n);
    for (AgentId i = 0; i < n; ++i) out[i] = reputation.all(i, publics);
    return out;
}

/// Soft terms an agent faces at t = 0: integrity at a zero falsification
/// streak and the given reputation row (zeros when none).
inline PositionMap<SoftTerms> initial_soft_terms(const AgentParams& a, const IntegritySpec& integrity,
                                                 const PositionMap<double>* reputation) {
    PositionMap<SoftTerms> soft;
    for (Position y : kAllPositions) {
        soft[y].reputation = reputation ? (*reputation)[y] : 0.0;
        soft[y].integrity = integrity_value(integrity, y, a.private_type, 0);
    }
    return soft;
}

/// Agents who choose R at zero public support. `reputation` is either empty
/// (reputation counts as 0) or holds one row per agent.
inline std::vector<AgentId> first_movers(std::span<const AgentParams> agents, const Environment& env0,
                                         const IntegritySpec& integrity,
                                         std::span<const PositionMap<double>> reputation = {}) {
    if (!reputation.empty() && reputation.size() != agents.size()) {
        throw InvalidParameter("reputation table does not match the population");
    }
    std::vector<AgentId> out;
    for (AgentId i = 0; i < agents.size(); ++i) {
        const AgentParams eff = effective_params(agents[i], env0);
        const double p = perceived_probability(eff, 0.0, env0);
        const auto soft = initial_soft_terms(agents[i], integrity, reputation.empty() ? nullptr : &reputation[i]);
        if (decide(eff, p, soft, Position::NJ) == Position::R) out.push_back(i);
    }
    return out;
}

struct CascadeReport {
    std::vector<double> sorted_thresholds;
    std::vector<double> equilibria;       // every fixed point k/n, ascending
    double from_zero = 0.0;               // limit of the iteration started at s = 0
    std::size_t iterations_from_zero = 0; // number of share changes on the way
    std::optional<std::size_t> tipping_seed;
};

/// Threshold cascade s <- |{i : threshold_i < p(s)}| / n on the lattice k/n.
/// `p_of_share` must be non-decreasing on [0, 1].
template <class ShareToProbability>
CascadeReport cascade_equilibria(std::span<const double> thresholds, ShareToProbability&& p_of_share) {
    CascadeReport report;
    report.sorted_thresholds.assign(thresholds.begin(), thresholds.end());
    std::sort(report.sorted_thresholds.begin(), report.sorted_thresholds.end());
    const std::size_t n = thresholds.size();
    if (n == 0) return report;

    const auto& sorted = report.sorted_thresholds;
    // Count of thresholds strictly below p(k/n).
    auto movers = [&](std::size_t k) -> std::size_t {
        const double p = p_of_share(static_cast<double>(k) / static_cast<double>(n));
        return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
    };
    auto iterate = [&](std::size_t k, std::size_t* changes) {
        for (std::size_t guard = 0; guard <= n + 1; ++guard) {
            const std::size_t next = movers(k);
            if (next == k) break;
            k = next;
            if (changes) ++*changes;
        }
        return k;
    };

    std::vector<std::size_t> fixed;
    for (std::size_t k = 0; k <= n; ++k) {
        if (movers(k) == k) fixed.push_back(k);
    }
    for (std::size_t k : fixed) report.equilibria.push_back(static_cast<double>(k) / static_cast<double>(n));

    std::size_t changes = 0;
    report.from_zero = static_cast<double>(iterate(0, &changes)) / static_cast<double>(n);
    report.iterations_from_zero = changes;

    if (!fixed.empty()) {
        const std::size_t largest = fixed.back();
        for (std::size_t k = 0; k <= n; ++k) {
            if (iterate(k, nullptr) == largest) {
                report.tipping_seed = k;
                break;
            }
        }
    }
    return report;
}

inline std::vector<std::pair<int, std::size_t>> falsification_series(std::span<const StepRecord> records) {
    std::vector<std::pair<int, std::size_t>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.emplace_back(r.t, r.n_falsifying);
    return out;
}

struct SvgOptions {
    int width = 800;
    int height = 400;
    std::string title = "Public positions over time";
};

namespace detail {

inline std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

} // namespace detail

/// Standalone SVG 1.1: share polylines for R, U and NJ on the left axis,
/// exited count on the right axis, labelled vertical lines at event steps.
inline std::string render_svg(std::span<const StepRecord> records, const SvgOptions& options = {}) {
    using detail::fmt2;
    if (records.empty()) throw InvalidParameter("render_svg needs at least one record");
    if (options.width < 200 || options.height < 150) throw InvalidParameter("SVG canvas too small");

    const double left = 60, right = 60, top = 40, bottom = 50;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;
    const int t0 = records.front().t;
    const int t1 = records.back().t;
    std::size_t max_exited = 1;
    for (const auto& r : records) max_exited = std::max(max_exited, r.n_exited);

    auto x_of = [&](int t) {
        if (t1 == t0) return left + plot_w / 2;
        return left + plot_w * static_cast<double>(t - t0) / static_cast<double>(t1 - t0);
    };
    auto y_share = [&](double s) { return top + plot_h * (1.0 - s); };
    auto y_exited = [&](std::size_t e) {
        return top + plot_h * (1.0 - static_cast<double>(e) / static_cast<double>(max_exited));
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(options.width) +
           "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) +
           " " + std::to_string(options.height) + "\">\n";
    svg += "<title>" + detail::xml_escape(options.title) + "</title>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(options.width) + "\" height=\"" +
           std::to_string(options.height) + "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt2(options.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" + detail::xml_escape(options.title) + "</text>\n";

    // Axes and ticks.
    svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(left) + "\" y2=\"" +
           fmt2(top + plot_h) + "\"/>\n";
    svg += "<line x1=\"" + fmt2(left + plot_w) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(left + plot_w) +
           "\" y2=\"" + fmt2(top + plot_h) + "\"/>\n";
    svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(top + plot_h) + "\" x2=\"" + fmt2(left + plot_w) +
           "\" y2=\"" + fmt2(top + plot_h) + "\"/>\n";
    svg += "</g>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double s = i / 4.0;
        svg += "<text x=\"" + fmt2(left - 6) + "\" y=\"" + fmt2(y_share(s) + 3) + "\" text-anchor=\"end\">" +
               fmt2(s) + "</text>\n";
        const auto e = static_cast<double>(max_exited) * s;
        svg += "<text x=\"" + fmt2(left + plot_w + 6) + "\" y=\"" + fmt2(y_share(s) + 3) + "\">" + fmt2(e) +
               "</text>\n";
    }
    svg += "<text x=\"" + fmt2(left) + "\" y=\"" + fmt2(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
           std::to_string(t0) + "</text>\n";
    if (t1 != t0) {
        svg += "<text x=\"" + fmt2(left + plot_w) + "\" y=\"" + fmt2(top + plot_h + 16) +
               "\" text-anchor=\"middle\">" + std::to_string(t1) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2(left + plot_w / 2) + "\" y=\"" + fmt2(top + plot_h + 34) +
           "\" text-anchor=\"middle\">step</text>\n";
    svg += "<text x=\"14\" y=\"" + fmt2(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           fmt2(top + plot_h / 2) + ")\">share</text>\n";
    svg += "<text x=\"" + fmt2(options.width - 14.0) + "\" y=\"" + fmt2(top + plot_h / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(90 " + fmt2(options.width - 14.0) + " " +
           fmt2(top + plot_h / 2) + ")\">exited</text>\n";
    svg += "</g>\n";

    // Event markers.
    svg += "<g class=\"events\" font-family=\"sans-serif\" font-size=\"9\">\n";
    for (const auto& r : records) {
        if (r.events.empty()) continue;
        std::string label;
        for (const auto& e : r.events) {
            if (!label.empty()) label += "; ";
            label += e;
        }
        const double x = x_of(r.t);
        svg += "<g class=\"event\" data-step=\"" + std::to_string(r.t) + "\">";
        svg += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(x) + "\" y2=\"" +
               fmt2(top + plot_h) + "\" stroke=\"#999999\" stroke-dasharray=\"3,3\"/>";
        svg += "<text x=\"" + fmt2(x + 2) + "\" y=\"" + fmt2(top + 10) + "\" transform=\"rotate(90 " + fmt2(x + 2) +
               " " + fmt2(top + 10) + ")\">" + detail::xml_escape(label) + "</text>";
        svg += "</g>\n";
    }
    svg += "</g>\n";

    struct Series {
        const char* name;
        const char* color;
        double StepRecord::*share;
    };
    const Series series[] = {{"R", "#c0392b", &StepRecord::share_R},
                             {"U", "#2874a6", &StepRecord::share_U},
                             {"NJ", "#7f8c8d", &StepRecord::share_NJ}};
    for (const auto& s : series) {
        if (records.size() == 1) {
            svg += "<circle class=\"share-" + std::string(s.name) + "\" cx=\"" + fmt2(x_of(records[0].t)) +
                   "\" cy=\"" + fmt2(y_share(records[0].*s.share)) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
            continue;
        }
        svg += "<polyline class=\"share-" + std::string(s.name) + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (i) svg += ' ';
            svg += fmt2(x_of(records[i].t)) + "," + fmt2(y_share(records[i].*s.share));
        }
        svg += "\"/>\n";
    }
    if (records.size() > 1) {
        svg += "<polyline class=\"exited\" fill=\"none\" stroke=\"#8e44ad\" stroke-width=\"1\" "
               "stroke-dasharray=\"5,3\" points=\"";
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (i) svg += ' ';
            svg += fmt2(x_of(records[i].t)) + "," + fmt2(y_exited(records[i].n_exited));
        }
        svg += "\"/>\n";
    } else {
        svg += "<circle class=\"exited\" cx=\"" + fmt2(x_of(records[0].t)) + "\" cy=\"" +
               fmt2(y_exited(records[0].n_exited)) + "\" r=\"2\" fill=\"#8e44ad\"/>\n";
    }

    // Legend.
    svg += "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    const char* names[] = {"public R", "public U", "NJ", "exited"};
    const char* colors[] = {"#c0392b", "#2874a6", "#7f8c8d", "#8e44ad"};
    for (int i = 0; i < 4; ++i) {
        const double x = left + 10 + i * 80.0;
        const double y = options.height - 12.0;
        svg += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
               colors[i] + "\"/><text x=\"" + fmt2(x + 14) + "\" y=\"" + fmt2(y) + "\">" + names[i] + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace pfsim
