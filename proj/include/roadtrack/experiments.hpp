#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roadtrack/metrics.hpp"
#include "roadtrack/run_config.hpp"
#include "roadtrack/scenario.hpp"
#include "roadtrack/tracker.hpp"

namespace roadtrack {

struct SequenceData {
    ScenarioSpec spec;
    GtSequence gt;
    std::vector<FramePacket> packets;
};

/// simulate + degrade with the spec's own detector (perfect when absent).
SequenceData generate(const ScenarioSpec& spec, std::uint64_t detector_seed);

std::vector<GroundTruthEntry> gt_entries(const GtSequence& gt);
std::vector<HypothesisEntry> hyp_entries(std::span<const OutputRow> rows);

/// `base` with the sequence's camera scale and frame period.
TrackerConfig config_for(const GtSequence& gt, const TrackerConfig& base);

struct AblationRow {
    std::uint64_t seed = 0;
    MotionModelKind model = MotionModelKind::simcai;
    MetricsReport report;
    double fps = 0.0;  // frames per second of the tracking stage
};

/// Three rows per seed (constant_velocity, rvo_only, simcai), same detections.
std::vector<AblationRow> run_ablation(SuiteKind kind, std::span<const std::uint64_t> seeds, const RunConfig& cfg);
std::string ablation_csv(std::span<const AblationRow> rows);

struct FeatureRow {
    std::uint64_t seed = 0;
    FeatureKind kind = FeatureKind::mask;
    MetricsReport report;
    std::size_t lost_tracks = 0;
    double rejection_rate = 0.0;  // rejected / tracks with candidates
};

/// Two rows per seed (mask, bbox_fill), same detections.
std::vector<FeatureRow> run_feature_comparison(SuiteKind kind, std::span<const std::uint64_t> seeds,
                                               const RunConfig& cfg);

struct BenchRow {
    int n = 0;
    double mean_us_per_frame = 0.0;      // whole tracking stage
    double mean_solver_us_per_frame = 0.0;  // motion-model share
    double median_us_per_frame = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Tracks every density_sweep sequence with `cfg`'s motion model; one row per n.
std::vector<BenchRow> run_bench(std::span<const std::uint64_t> seeds, const RunConfig& cfg);
/// Rows "n,mean_us_per_frame,mean_solver_us_per_frame,median_us_per_frame" and
/// a footer "r2,<value>" from fitting the solver time against n.
std::string bench_csv(std::span<const BenchRow> rows);

/// Parses "1,2,5-8" into a seed list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace roadtrack
