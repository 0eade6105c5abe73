#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roadtrack/geometry.hpp"
#include "roadtrack/orca.hpp"

namespace roadtrack {

struct GroundTruthEntry {
    int frame = 1;
    int gt_id = 0;
    BBox bbox;
    AgentType type = AgentType::pedestrian;
    bool stationary = false;
    double visibility = 1.0;
};

struct HypothesisEntry {
    int frame = 1;
    int id = 0;
    BBox bbox;
};

struct EvalConfig {
    double iou_match_threshold = 0.5;
    bool count_fp = true;
    double mt_fraction = 0.8;
    double ml_fraction = 0.2;

    void validate() const;
};

struct FrameMatch {
    int frame = 1;
    std::vector<int> gt_ids;                    // counted (non-stationary) GT present
    std::vector<std::pair<int, int>> matches;   // (gt_id, hyp_id)
    std::vector<double> ious;                   // parallel to matches
    int fn = 0;
    int fp = 0;
};

/// Matches one frame. `previous` maps gt_id -> hyp_id from earlier frames;
/// those pairs are kept first when still above the IoU threshold, then the
/// rest is solved by Hungarian on IoU. Stationary GT rows are ignored, and
/// hypotheses overlapping only stationary GT are not counted as FP.
FrameMatch match_frame(std::span<const GroundTruthEntry> gt, std::span<const HypothesisEntry> hyp,
                       const EvalConfig& cfg, const std::map<int, int>& previous = {});

struct MetricsReport {
    double mota = 0.0;
    double motp = 0.0;  // mean matched IoU, percent
    double mt_pct = 0.0;
    double ml_pct = 0.0;
    int ids = 0;
    int fn = 0;
    int fn_per_agent = 0;  // per-agent, per-frame count of GT agents without a matched track
    int fp = 0;
    int gt = 0;
    int matched = 0;
    int trajectories = 0;
};

/// Number of changes in a sequence of matched hypothesis ids.
int ids_count(std::span<const int> matched_hyp_ids);

/// (mt_pct, ml_pct) from per-trajectory coverage fractions in [0, 1].
std::pair<double, double> mt_ml(std::span<const double> coverage, const EvalConfig& cfg);

/// Throws std::invalid_argument when GT = 0; std::logic_error when the two
/// FN counts disagree.
MetricsReport accumulate(std::span<const FrameMatch> frames, const EvalConfig& cfg);

/// Groups rows by frame, runs match_frame with continuity, then accumulate.
MetricsReport evaluate(std::span<const GroundTruthEntry> gt, std::span<const HypothesisEntry> hyp,
                       const EvalConfig& cfg);

/// Header and one data row: fps, mt, ml, ids, fn, motp, mota.
std::string report_csv(const MetricsReport& r, double fps);

}  // namespace roadtrack
