#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadtrack/detection.hpp"
#include "roadtrack/orca.hpp"
#include "roadtrack/simcai.hpp"
#include "roadtrack/tracker.hpp"

namespace roadtrack {

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioAgent {
    AgentType type = AgentType::pedestrian;
    double radius = 0.3;
    double preferred_speed = 1.4;
    Vec2 spawn;
    std::vector<Vec2> goals;  // visited in order; the agent leaves at the last one
    int spawn_frame = 1;
};

/// Agents are referenced by index into ScenarioSpec::agents.
struct ScriptedInteraction {
    std::size_t a = 0;
    std::size_t b = 0;
    int start_frame = 1;
};

struct CameraModel {
    double px_per_meter = 20.0;
    int image_width = 800;
    int image_height = 600;
};

struct DetectorModel {
    double miss_prob_base = 0.0;
    double occlusion_miss_boost = 0.0;
    double bbox_jitter_sigma = 0.0;  // px
    int mask_erosion = 0;            // px
    double min_visibility = 0.0;

    void validate() const;
};

struct ScenarioSpec {
    std::string name = "scenario";
    int duration_frames = 100;
    double fps = 30.0;
    Vec2 world_size{40.0, 30.0};
    std::vector<ScenarioAgent> agents;
    std::vector<ScriptedInteraction> interactions;
    CameraModel camera;
    std::uint64_t seed = 1;
    std::optional<DetectorModel> detector;
    InteractionParams interaction;
    OrcaParams orca;  // dt is overridden by 1 / fps

    /// Throws ScenarioError; overlapping spawns name both agents.
    void validate() const;
    /// Fraction of agents taking part in at least one scripted interaction.
    double interacting_fraction() const;
};

ScenarioSpec spec_from_json_text(std::string_view text);
std::string spec_to_json_text(const ScenarioSpec& spec);

struct GtRow {
    int frame = 1;
    int gt_id = 0;  // agent index + 1
    AgentType type = AgentType::pedestrian;
    BBox bbox;
    RleMask mask;
    bool stationary = false;
    Vec2 position;  // meters
    double radius = 0.3;
};

struct GtSequence {
    std::vector<GtRow> rows;  // sorted by (frame, gt_id)
    int frames = 0;
    double fps = 30.0;
    double px_per_meter = 20.0;
    int image_width = 0;
    int image_height = 0;
};

/// Inscribed ellipse raster of a box, round(h) x round(w) cells (at least 1x1).
RleMask ellipse_mask(const BBox& box);

/// Runs the interaction model from the spec's spawns. Scripted pairs get an
/// active intent from their start frame on; no other pair ever interacts.
GtSequence simulate(const ScenarioSpec& spec);

/// Fraction of each box not covered by the union of nearer boxes. Nearer
/// means a larger bottom edge, ties broken by the later index.
std::vector<double> frame_visibility(std::span<const BBox> boxes);

/// Detector emulation; one packet per frame 1..frames, possibly empty.
std::vector<FramePacket> degrade(const GtSequence& gt, const DetectorModel& model,
                                 std::uint64_t seed);

enum class SuiteKind : std::uint8_t { interaction_heavy, occlusion_heavy, density_sweep };
SuiteKind suite_kind_from_string(std::string_view name);
std::string_view to_string(SuiteKind k);

inline constexpr int kDensityCounts[] = {10, 20, 40, 80, 160};

/// One density_sweep sequence: n agents at 16 m^2 each, no interactions.
ScenarioSpec density_spec(std::uint64_t seed, int n);

/// density_sweep gives one spec per count in kDensityCounts per seed.
std::vector<ScenarioSpec> suite(SuiteKind kind, std::span<const std::uint64_t> seeds);

}  // namespace roadtrack
