#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "roadtrack/orca.hpp"

namespace roadtrack {

/// Interaction-model parameters. Distances in meters, angles in radians.
struct InteractionParams {
    double social_distance = 3.0;
    double public_distance = 7.0;
    int tau = 15;
    /// Personal-space radius is agent radius + personal_margin.
    double personal_margin = 0.3;
    PerType<double> steer_half_angle{1.0471975511965976,   // pedestrian, 60 deg
                                     0.6981317007977318,   // two-wheeler, 40 deg
                                     0.5235987755982988,   // three-wheeler, 30 deg
                                     0.4363323129985824,   // car, 25 deg
                                     0.2617993877991494,   // bus, 15 deg
                                     0.2617993877991494};  // truck, 15 deg
    double delta_t = 0.5;
    /// Merge radius parameter as a multiple of the personal radius.
    double epsilon_scale = 1.0;
    /// Speed below which an agent with no preferred motion is stationary.
    double stationary_speed = 0.05;
    /// Cap on |Q|, the interaction candidates considered per target.
    std::size_t max_candidates = 8;
    /// Fallback speed when an agent's preferred velocity is zero.
    PerType<double> preferred_speed{1.4, 5.0, 4.0, 8.0, 6.0, 6.0};

    void validate() const;
};

double personal_radius(const AgentState& a, const InteractionParams& p);
double merge_epsilon(const AgentState& a, const AgentState& b, const InteractionParams& p);

struct PairIntent {
    std::pair<AgentId, AgentId> pair;
    int consecutive_frames_within_social = 0;
    bool active = false;
};

/// Ordered-pair intent counters. Pairs with a zero counter are not stored.
class IntentTable {
public:
    const PairIntent* find(AgentId self, AgentId other) const;
    bool active(AgentId self, AgentId other) const;
    void set(const PairIntent& intent);
    void erase(AgentId self, AgentId other);
    /// Sets the counter to tau and marks active (used for scripted interactions).
    void force_active(AgentId self, AgentId other, int tau);
    std::size_t size() const { return entries_.size(); }
    const std::map<std::pair<AgentId, AgentId>, PairIntent>& entries() const { return entries_; }

private:
    std::map<std::pair<AgentId, AgentId>, PairIntent> entries_;
};

/// Optional restriction on which ordered pairs may accumulate intent.
using IntentEligibility = std::function<bool(AgentId self, AgentId other)>;

IntentTable update_intents(std::span<const AgentState> agents, const IntentTable& intents,
                           const InteractionParams& params,
                           const IntentEligibility& eligible = nullptr);

struct AbilityResult {
    bool omega1 = false;     // a boundary ray reaches the personal disc
    bool omega2 = false;     // the partner center lies inside the cone
    bool obstructed = false;  // a third agent sits in the cone, nearer than the partner
    double selected_ray_angle = 0.0;
    bool can_interact() const { return (omega1 || omega2) && !obstructed; }
};

/// Steering cone of `self`; heading follows v_pref, or points at `target`
/// when v_pref is zero.
Cone2D steering_cone(const AgentState& self, const Vec2& target, const InteractionParams& params);

/// Throws GeometryError if i and k share a position.
AbilityResult evaluate_ability(const AgentState& i, const AgentState& k,
                               std::span<const AgentState> others,
                               const InteractionParams& params);
bool can_interact(const AgentState& i, const AgentState& k, std::span<const AgentState> others,
                  const InteractionParams& params);

/// Redirects both preferred velocities along the joining line and sets
/// velocity = v_pref. Positions are untouched.
std::pair<AgentState, AgentState> interaction_step(const AgentState& i, const AgentState& k,
                                                   const InteractionParams& params = {});

/// ||p_i - p_k|| / ||v_i - v_k||; +inf when the velocities are equal.
double convergence_time(const AgentState& i, const AgentState& k);

/// Single agent at the midpoint with radius 2*epsilon when the personal discs overlap.
std::optional<AgentState> merge_if_overlapping(const AgentState& i, const AgentState& k,
                                               const InteractionParams& params);

/// argmin over Q of ||(p_w + v_w * delta_t) - p_k||, ties to the smaller id.
/// Throws std::invalid_argument when Q is empty.
AgentId resolve_multi(std::span<const AgentState> candidates, const AgentState& k,
                      const InteractionParams& params);

struct Stationary {};
struct CollisionAvoiding {};
struct Interacting {
    AgentId partner;
};
struct Merged {
    AgentId partner;
};
using AgentPhase = std::variant<Stationary, CollisionAvoiding, Interacting, Merged>;

struct MergeRecord {
    AgentId a = 0;
    AgentId b = 0;
    int separated_frames = 0;
};

struct SimcaiOutput {
    std::vector<AgentState> agents;
    std::vector<AgentPhase> phases;
    /// Merge set after this step (existing plus newly formed).
    std::vector<MergeRecord> merges;
    std::size_t solver_calls = 0;
    double solver_seconds = 0.0;
};

/// One SimCAI prediction step over an immutable snapshot.
SimcaiOutput predict_simcai(std::span<const AgentState> agents, const IntentTable& intents,
                            std::span<const MergeRecord> merges, const InteractionParams& params,
                            const OrcaParams& orca);

/// Stateful wrapper: owns intents and merges across frames.
class SimcaiModel {
public:
    SimcaiModel(InteractionParams params, OrcaParams orca);

    void set_eligibility(IntentEligibility eligible) { eligible_ = std::move(eligible); }
    IntentTable& intents() { return intents_; }
    const std::vector<MergeRecord>& merges() const { return merges_; }

    /// Updates intents from `agents`, predicts, and commits the new merge set.
    SimcaiOutput step(std::span<const AgentState> agents);

    /// Split bookkeeping against observed member positions: a merge is dropped
    /// once its members stay more than 2*epsilon apart for tau frames.
    void observe(std::span<const AgentState> observed);

    const InteractionParams& params() const { return params_; }
    const OrcaParams& orca() const { return orca_; }

private:
    InteractionParams params_;
    OrcaParams orca_;
    IntentTable intents_;
    std::vector<MergeRecord> merges_;
    IntentEligibility eligible_;
};

}  // namespace roadtrack
