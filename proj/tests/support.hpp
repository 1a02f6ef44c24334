// Shared fixtures and independent oracles for the test suite.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pfsim/model.hpp"
#include "pfsim/reputation.hpp"
#include "pfsim/rng.hpp"

namespace pfsim::testkit {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(PFSIM_FIXTURE_DIR) / name; }
inline std::filesystem::path scenario_file(const std::string& name) {
    return std::filesystem::path(PFSIM_SCENARIO_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pfsim-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Dense power iteration for the damped random surfer. Column-stochastic
/// matrix built explicitly, dangling columns uniform.
inline std::vector<double> power_iteration_oracle(std::size_t n, const std::vector<Edge>& edges, double d,
                                                  int iterations = 5000) {
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    std::vector<double> out(n, 0.0);
    for (const auto& e : edges) out[e.source] += e.weight;
    for (const auto& e : edges) m[e.target][e.source] += e.weight / out[e.source];
    for (std::size_t j = 0; j < n; ++j)
        if (out[j] == 0.0)
            for (std::size_t i = 0; i < n; ++i) m[i][j] = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> y(n, (1.0 - d) / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) y[i] += d * m[i][j] * x[j];
        x = y;
    }
    return x;
}

/// Randomized agent with factors in [0, 10] and C >= c.
inline AgentParams random_agent(Rng& rng) {
    AgentParams a;
    a.freedom_value = uniform(rng, 0, 10);
    a.status_quo_value = uniform(rng, 0, 10);
    a.arrest_cost = uniform(rng, 0, 10);
    a.reprisal_cost = uniform(rng, 0, 10);
    double c1 = uniform(rng, 0, 10), c2 = uniform(rng, 0, 10);
    a.abstain_cost = std::min(c1, c2);
    a.oppose_cost = std::max(c1, c2);
    a.private_type = uniform01(rng) < 0.5 ? PrivateType::ProRebellion : PrivateType::ProStatusQuo;
    a.base_success_belief = uniform01(rng);
    return a;
}

inline PositionMap<SoftTerms> random_soft(Rng& rng) {
    PositionMap<SoftTerms> soft;
    for (Position y : kAllPositions) soft[y] = {uniform(rng, -3, 3), uniform(rng, -3, 3)};
    return soft;
}

} // namespace pfsim::testkit
