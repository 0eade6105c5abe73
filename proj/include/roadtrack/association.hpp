#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "roadtrack/detection.hpp"
#include "roadtrack/features.hpp"
#include "roadtrack/hungarian.hpp"
#include "roadtrack/orca.hpp"

namespace roadtrack {

using TrackId = std::uint32_t;

enum class TrackStatus : std::uint8_t { tentative, confirmed, dead };

struct Track {
    TrackId id = 0;
    AgentState state;  // world coordinates
    BBox bbox;         // predicted box for the current frame, pixels
    std::deque<BinaryFeature> gallery;
    int age_since_update = 0;
    int hits = 0;
    TrackStatus status = TrackStatus::tentative;
    int last_match_frame = 0;
    Vec2 last_center_px;
};

struct AssocConfig {
    double cosine_threshold = 0.4;  // lambda: larger appearance distance rejects
    int max_age = 30;               // xi, frames
    double gating_radius = 60.0;    // px
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    int min_hits_to_confirm = 3;
    std::size_t gallery_size = 30;
    double score_floor = 0.3;
    FeatureKind feature_kind = FeatureKind::mask;
    std::size_t feature_rows = kFeatureRows;
    std::size_t feature_cols = kFeatureCols;

    /// Throws std::invalid_argument; checks lambda1 + lambda2 = 1.
    void validate() const;
};

/// Pixel <-> world conversion and frame timing used when a match updates state.
struct MeasurementModel {
    double px_per_meter = 20.0;
    double dt = 1.0 / 30.0;
    /// Weight of the newest velocity measurement (1 = last two centers only).
    double velocity_smoothing = 0.5;
};

/// Unmatched detections whose centers lie within gating_radius of the track's
/// predicted center (inclusive).
std::vector<std::size_t> gate(const Track& track, std::span<const Detection> detections,
                              const std::vector<bool>& already_matched, const AssocConfig& cfg);

/// Smallest gallery distance to `feature`. Throws when the gallery is empty.
double gallery_distance(const Track& track, const BinaryFeature& feature);

struct CosineMatch {
    std::size_t detection = 0;
    double distance = 0.0;
};

/// Candidate with the smallest gallery distance; ties go to the lower index.
/// Throws std::invalid_argument on an empty candidate list.
CosineMatch best_cosine(const Track& track, std::span<const std::size_t> candidates,
                        std::span<const BinaryFeature> features);

/// lambda1 * (1 - cosine distance) + lambda2 * IoU(predicted box, detection box).
double combined_score(const Track& track, const Detection& detection, double cosine_dist,
                      const AssocConfig& cfg);

struct AssociationStats {
    std::size_t matched = 0;
    std::size_t tracks_with_candidates = 0;
    std::size_t rejected_by_cosine = 0;  // tracks whose gated candidates were all rejected
    std::size_t births = 0;
    std::size_t lost_tracks = 0;         // confirmed tracks destroyed after max_age
    std::size_t tentative_deaths = 0;

    AssociationStats& operator+=(const AssociationStats& o);
};

struct AssociationResult {
    std::vector<std::pair<TrackId, std::size_t>> matches;  // (track id, detection index)
    AssociationStats stats;
};

/// Matches tracks (already advanced to `frame`) to detections and applies the
/// lifecycle: matched tracks refresh, unmatched tracks age and die past
/// max_age, unmatched detections spawn tentative tracks with fresh ids.
AssociationResult update_tracks(std::vector<Track>& tracks, std::span<const Detection> detections,
                                 const AssocConfig& cfg, const MeasurementModel& mm, int frame,
                                 TrackId& next_id);

/// Box shape convention shared by the renderer and the tracker: pedestrians
/// are upright (2r x 3r), vehicles are wide (2.4r x 1.6r). Returns (w, h) in px.
Vec2 box_extent_px(AgentType type, double radius, double px_per_meter);

/// Inverse of box_extent_px: upright boxes are pedestrians, wide boxes are
/// reported as cars. Returns (type, radius in meters).
std::pair<AgentType, double> infer_agent(const BBox& box, double px_per_meter);

}  // namespace roadtrack
