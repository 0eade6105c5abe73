#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "roadtrack/geometry.hpp"
#include "roadtrack/orca.hpp"

namespace testing {

// Hand-rolled generators for the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng_); }

    roadtrack::Vec2 vec(double lo, double hi) { return {real(lo, hi), real(lo, hi)}; }
    roadtrack::Vec2 in_disc(double radius) {
        for (;;) {
            const roadtrack::Vec2 v = vec(-radius, radius);
            if (roadtrack::abs_sq(v) <= radius * radius) return v;
        }
    }
    roadtrack::BBox box(double extent = 100.0) {
        return {real(-extent, extent), real(-extent, extent), real(0.5, extent / 2), real(0.5, extent / 2)};
    }
    std::vector<std::uint8_t> bits(std::size_t n, double p = 0.5) {
        std::vector<std::uint8_t> out(n);
        for (auto& b : out) b = coin(p) ? 1 : 0;
        return out;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Agents on a jittered lattice with random goals: never overlapping at start.
inline std::vector<roadtrack::AgentState> lattice_agents(Gen& g, int n, double spacing, double speed) {
    using namespace roadtrack;
    std::vector<AgentState> out;
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (int i = 0; i < n; ++i) {
        AgentState a;
        a.id = static_cast<AgentId>(i + 1);
        a.radius = g.real(0.2, 0.4);
        a.position = Vec2{(i % side) * spacing, (i / side) * spacing} + g.in_disc(0.1 * spacing);
        a.v_pref = g.in_disc(speed);
        a.velocity = a.v_pref;
        out.push_back(a);
    }
    return out;
}

inline double min_gap(const std::vector<roadtrack::AgentState>& agents) {
    double best = 1e300;
    for (std::size_t i = 0; i < agents.size(); ++i)
        for (std::size_t j = i + 1; j < agents.size(); ++j)
            best = std::min(best, roadtrack::distance(agents[i].position, agents[j].position) -
                                      agents[i].radius - agents[j].radius);
    return best;
}

}  // namespace testing
