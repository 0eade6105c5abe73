#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "roadtrack/association.hpp"
#include "roadtrack/detection.hpp"
#include "roadtrack/orca.hpp"
#include "roadtrack/simcai.hpp"

namespace roadtrack {

enum class MotionModelKind : std::uint8_t { constant_velocity, rvo_only, simcai };

std::string_view to_string(MotionModelKind k);
/// Throws std::invalid_argument for unknown names.
MotionModelKind motion_model_from_string(std::string_view name);

struct FramePacket {
    int frame = 1;
    std::vector<Detection> detections;
};

struct TrackerConfig {
    MotionModelKind motion = MotionModelKind::simcai;
    AssocConfig assoc;
    OrcaParams orca;
    InteractionParams interaction;
    double px_per_meter = 20.0;
    double velocity_smoothing = 0.5;
    /// Confirmed tracks missed for up to this many frames still report their
    /// predicted box. 0 reports matched tracks only.
    int coast_output_frames = 3;

    /// Validates every nested block; orca.dt is taken as the frame period.
    void validate() const;
};

struct OutputRow {
    int frame = 1;
    TrackId id = 0;
    BBox bbox;
    bool operator==(const OutputRow&) const = default;
};

class Tracker {
public:
    explicit Tracker(TrackerConfig cfg);

    /// Processes one frame; skipped frames are run as empty frames first.
    /// Returns output rows (sorted by frame, then id) for every processed frame.
    /// Throws std::invalid_argument when packet.frame <= the last frame.
    std::vector<OutputRow> step(const FramePacket& packet);

    const std::vector<Track>& tracks() const { return tracks_; }
    const AssociationStats& stats() const { return stats_; }
    int last_frame() const { return last_frame_; }
    /// Seconds spent in the motion model during the most recent step() call.
    double last_predict_seconds() const { return last_predict_seconds_; }

private:
    std::vector<OutputRow> step_one(int frame, std::span<const Detection> detections);
    void predict();

    TrackerConfig cfg_;
    MeasurementModel mm_;
    std::vector<Track> tracks_;
    TrackId next_id_ = 1;
    int last_frame_ = 0;
    AssociationStats stats_;
    SimcaiModel simcai_;
    double last_predict_seconds_ = 0.0;
};

struct RunResult {
    std::vector<OutputRow> rows;
    std::vector<int> frames;           // one entry per packet
    std::vector<double> frame_us;      // tracking-stage wall time per packet
    std::vector<double> predict_us;    // motion-model share of frame_us
    AssociationStats stats;
};

/// Runs a whole sequence. Errors are rethrown with the offending frame number.
RunResult run(std::span<const FramePacket> packets, const TrackerConfig& cfg);

}  // namespace roadtrack
