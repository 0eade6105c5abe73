#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "roadtrack/geometry.hpp"

namespace roadtrack {

enum class AgentType : std::uint8_t { pedestrian, two_wheeler, three_wheeler, car, bus, truck };

inline constexpr std::size_t kAgentTypeCount = 6;

template <class T>
using PerType = std::array<T, kAgentTypeCount>;

template <class T>
constexpr const T& at(const PerType<T>& table, AgentType t) {
    return table[static_cast<std::size_t>(t)];
}
template <class T>
constexpr T& at(PerType<T>& table, AgentType t) {
    return table[static_cast<std::size_t>(t)];
}

std::string_view to_string(AgentType t);
/// Throws std::invalid_argument on unknown names.
AgentType agent_type_from_string(std::string_view name);
bool is_vehicle(AgentType t);

using AgentId = std::uint32_t;

/// RVO state of one road-agent in world coordinates.
struct AgentState {
    AgentId id = 0;
    Vec2 position;
    Vec2 velocity;
    Vec2 v_pref;
    double radius = 0.3;
    AgentType type = AgentType::pedestrian;
};

struct OrcaParams {
    double time_horizon = 2.0;
    double dt = 1.0 / 30.0;
    PerType<double> max_speed{2.5, 10.0, 8.0, 15.0, 12.0, 12.0};
    double reciprocity = 0.5;
    /// Nearest constraining neighbours kept per agent; 0 keeps all.
    std::size_t max_neighbors = 10;

    void validate() const;
};

/// Velocity-space constraint: admissible v satisfy dot(v - point, normal) >= 0.
struct HalfPlane {
    Vec2 point;
    Vec2 normal;

    double violation(const Vec2& v) const { return -dot(v - point, normal); }
    bool operator==(const HalfPlane&) const = default;
};

std::optional<HalfPlane> orca_halfplane(const AgentState& self, const AgentState& other,
                                        const OrcaParams& params);

/// Closest velocity to v_pref inside all half-planes and the max_speed disc.
/// When the constraints are jointly infeasible, returns the velocity that
/// minimizes the largest violation.
Vec2 solve_velocity(const Vec2& v_pref, std::span<const HalfPlane> constraints, double max_speed);

/// Pairs for which no constraint should be generated (agent indices into the snapshot).
using PairFilter = std::function<bool(std::size_t self, std::size_t other)>;

std::vector<HalfPlane> build_constraints(std::span<const AgentState> agents, std::size_t self,
                                         const OrcaParams& params,
                                         const PairFilter& skip = nullptr);

/// Same result as build_constraints for every agent, with the nearest-neighbour
/// search run on a uniform grid (linear in n at bounded density).
std::vector<std::vector<HalfPlane>> build_all_constraints(std::span<const AgentState> agents,
                                                          const OrcaParams& params,
                                                          const PairFilter& skip = nullptr);

/// Solves every agent against the immutable snapshot, then commits
/// position += v_new * dt. Output order matches input order.
std::vector<AgentState> predict_orca(std::span<const AgentState> agents, const OrcaParams& params);

}  // namespace roadtrack
