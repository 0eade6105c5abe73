#include "roadtrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roadtrack {

void AssocConfig::validate() const {
    if (!(cosine_threshold >= 0.0 && cosine_threshold <= 1.0))
        throw std::invalid_argument("cosine_threshold must lie in [0, 1]");
    if (max_age < 1) throw std::invalid_argument("max_age must be >= 1");
    if (!(gating_radius > 0.0)) throw std::invalid_argument("gating_radius must be positive");
    if (lambda1 < 0.0 || lambda2 < 0.0) throw std::invalid_argument("lambda1, lambda2 must be >= 0");
    if (std::abs(lambda1 + lambda2 - 1.0) > 1e-9)
        throw std::invalid_argument("lambda1 + lambda2 must equal 1");
    if (min_hits_to_confirm < 1) throw std::invalid_argument("min_hits_to_confirm must be >= 1");
    if (gallery_size < 1) throw std::invalid_argument("gallery_size must be >= 1");
    if (!(score_floor >= 0.0 && score_floor <= 1.0))
        throw std::invalid_argument("score_floor must lie in [0, 1]");
    if (feature_rows == 0 || feature_cols == 0)
        throw std::invalid_argument("feature grid must be non-empty");
}

AssociationStats& AssociationStats::operator+=(const AssociationStats& o) {
    matched += o.matched;
    tracks_with_candidates += o.tracks_with_candidates;
    rejected_by_cosine += o.rejected_by_cosine;
    births += o.births;
    lost_tracks += o.lost_tracks;
    tentative_deaths += o.tentative_deaths;
    return *this;
}

std::vector<std::size_t> gate(const Track& track, std::span<const Detection> detections,
                              const std::vector<bool>& already_matched, const AssocConfig& cfg) {
    std::vector<std::size_t> out;
    const Vec2 c = bbox_center(track.bbox);
    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (j < already_matched.size() && already_matched[j]) continue;
        if (distance(bbox_center(detections[j].bbox), c) <= cfg.gating_radius) out.push_back(j);
    }
    return out;
}

double gallery_distance(const Track& track, const BinaryFeature& feature) {
    if (track.gallery.empty()) throw std::invalid_argument("gallery_distance: empty gallery");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : track.gallery) best = std::min(best, cosine_distance(g, feature));
    return best;
}

CosineMatch best_cosine(const Track& track, std::span<const std::size_t> candidates,
                        std::span<const BinaryFeature> features) {
    if (candidates.empty()) throw std::invalid_argument("best_cosine: no candidates");
    CosineMatch best{candidates[0], std::numeric_limits<double>::infinity()};
    for (std::size_t j : candidates) {
        const double d = gallery_distance(track, features[j]);
        if (d < best.distance || (d == best.distance && j < best.detection)) best = {j, d};
    }
    return best;
}

double combined_score(const Track& track, const Detection& detection, double cosine_dist,
                      const AssocConfig& cfg) {
    return cfg.lambda1 * (1.0 - cosine_dist) + cfg.lambda2 * iou(track.bbox, detection.bbox);
}

Vec2 box_extent_px(AgentType type, double radius, double px_per_meter) {
    const double r = radius * px_per_meter;
    if (type == AgentType::pedestrian) return {2.0 * r, 3.0 * r};
    return {2.4 * r, 1.6 * r};
}

std::pair<AgentType, double> infer_agent(const BBox& box, double px_per_meter) {
    if (box.h > box.w) return {AgentType::pedestrian, box.w / 2.0 / px_per_meter};
    return {AgentType::car, box.w / 2.4 / px_per_meter};
}

namespace {

void push_gallery(Track& t, BinaryFeature f, std::size_t cap) {
    t.gallery.push_back(std::move(f));
    while (t.gallery.size() > cap) t.gallery.pop_front();
}

void refresh(Track& t, const Detection& d, BinaryFeature f, const AssocConfig& cfg,
             const MeasurementModel& mm, int frame) {
    const Vec2 c = bbox_center(d.bbox);
    const int gap = std::max(1, frame - t.last_match_frame);
    const Vec2 measured = (c - t.last_center_px) / (gap * mm.dt * mm.px_per_meter);
    const double s = t.hits <= 1 ? 1.0 : mm.velocity_smoothing;
    t.state.velocity = measured * s + t.state.velocity * (1.0 - s);
    t.state.v_pref = t.state.velocity;
    t.state.position = c / mm.px_per_meter;
    t.bbox = d.bbox;
    t.last_center_px = c;
    t.last_match_frame = frame;
    t.age_since_update = 0;
    t.hits += 1;
    if (t.status == TrackStatus::tentative && t.hits >= cfg.min_hits_to_confirm)
        t.status = TrackStatus::confirmed;
    push_gallery(t, std::move(f), cfg.gallery_size);
}

}  // namespace

AssociationResult update_tracks(std::vector<Track>& tracks, std::span<const Detection> detections,
                                 const AssocConfig& cfg, const MeasurementModel& mm, int frame,
                                 TrackId& next_id) {
    AssociationResult result;
    std::vector<BinaryFeature> features;
    features.reserve(detections.size());
    for (const auto& d : detections)
        features.push_back(
            feature_from_detection(d, cfg.feature_kind, cfg.feature_rows, cfg.feature_cols));

    // Cascade: gate by radius and lambda, then Hungarian on the combined score.
    ScoreMatrix scores(tracks.size(), detections.size(), kForbidden);
    const std::vector<bool> none(detections.size(), false);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const auto cand = gate(tracks[i], detections, none, cfg);
        if (cand.empty()) continue;
        ++result.stats.tracks_with_candidates;
        bool any = false;
        for (std::size_t j : cand) {
            const double d = gallery_distance(tracks[i], features[j]);
            if (d > cfg.cosine_threshold) continue;
            const double s = combined_score(tracks[i], detections[j], d, cfg);
            if (s < cfg.score_floor) continue;
            scores(i, j) = s;
            any = true;
        }
        if (!any) ++result.stats.rejected_by_cosine;
    }

    const Assignment assignment = hungarian(scores);
    std::vector<bool> track_matched(tracks.size(), false);
    std::vector<bool> det_matched(detections.size(), false);
    for (const auto& [i, j] : assignment.pairs) {
        track_matched[i] = true;
        det_matched[j] = true;
        refresh(tracks[i], detections[j], std::move(features[j]), cfg, mm, frame);
        result.matches.emplace_back(tracks[i].id, j);
    }
    result.stats.matched = assignment.pairs.size();

    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (track_matched[i]) continue;
        Track& t = tracks[i];
        t.age_since_update += 1;
        if (t.status == TrackStatus::tentative) {
            t.status = TrackStatus::dead;
            ++result.stats.tentative_deaths;
        } else if (t.age_since_update > cfg.max_age) {
            t.status = TrackStatus::dead;
            ++result.stats.lost_tracks;
        }
    }
    std::erase_if(tracks, [](const Track& t) { return t.status == TrackStatus::dead; });

    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (det_matched[j]) continue;
        Track t;
        t.id = next_id++;
        const auto [type, radius] = infer_agent(detections[j].bbox, mm.px_per_meter);
        t.state.id = t.id;
        t.state.type = type;
        t.state.radius = radius;
        const Vec2 c = bbox_center(detections[j].bbox);
        t.state.position = c / mm.px_per_meter;
        t.bbox = detections[j].bbox;
        t.last_center_px = c;
        t.last_match_frame = frame;
        t.hits = 1;
        t.status = cfg.min_hits_to_confirm <= 1 ? TrackStatus::confirmed : TrackStatus::tentative;
        push_gallery(t, std::move(features[j]), cfg.gallery_size);
        tracks.push_back(std::move(t));
        ++result.stats.births;
    }
    return result;
}

}  // namespace roadtrack
