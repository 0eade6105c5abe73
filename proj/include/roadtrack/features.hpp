#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roadtrack/detection.hpp"

namespace roadtrack {

enum class FeatureKind : std::uint8_t { mask, bbox_fill };

class FeatureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flattened row-major 0/1 appearance tensor.
struct BinaryFeature {
    std::vector<std::uint8_t> bits;
    std::size_t rows = 0;
    std::size_t cols = 0;
    FeatureKind kind = FeatureKind::mask;

    std::size_t ones() const;
    bool operator==(const BinaryFeature&) const = default;
};

inline constexpr std::size_t kFeatureRows = 32;
inline constexpr std::size_t kFeatureCols = 32;

/// Resamples the detection onto a rows x cols grid, preserving the box aspect
/// ratio (the box is centered and letterboxed with zeros).
///   mask      -> mask pixels inside the box
///   bbox_fill -> every cell covered by the box
BinaryFeature feature_from_detection(const Detection& d, FeatureKind kind,
                                     std::size_t rows = kFeatureRows,
                                     std::size_t cols = kFeatureCols);

/// Zero-pads both to the common enclosing shape; originals stay top-left.
std::pair<BinaryFeature, BinaryFeature> pad_pair(const BinaryFeature& a, const BinaryFeature& b);

/// 1 - cos(a, b). Throws FeatureError on length mismatch or an all-zero input.
double cosine_distance(const BinaryFeature& a, const BinaryFeature& b);
double cosine_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct DeltaStats {
    std::size_t c1 = 0;  // +1 entries of fM - fF
    std::size_t c2 = 0;  // -1 entries
    std::size_t x = 0;   // ||fM||_0
    std::size_t y = 0;   // ||fF||_0
};

std::vector<std::int8_t> delta(std::span<const std::uint8_t> f_mask,
                               std::span<const std::uint8_t> f_box);
DeltaStats delta_stats(std::span<const std::uint8_t> f_mask, std::span<const std::uint8_t> f_box);

/// (p_a, p_b): counts of (1, 1) and (1, -1) coordinates of (f_track, delta).
std::pair<std::size_t, std::size_t> pa_pb(std::span<const std::uint8_t> f_track,
                                          std::span<const std::int8_t> delta);

/// Monte-Carlo frequency of p_a > p_b with p_a ~ U(0, c1), p_b ~ U(0, c2)
/// independent. Requires c1 > c2 and trials >= 10^4. Deterministic per seed.
double estimate_prob_pa_gt_pb(std::size_t c1, std::size_t c2, std::size_t trials,
                              std::uint64_t seed);

/// 1 - c2 / (2 c1): exact value for independent continuous uniforms.
double analytic_uniform_prob(std::size_t c1, std::size_t c2);
/// 1 - c2 / c1.
double count_bound_prob(std::size_t c1, std::size_t c2);

struct OrderingCell {
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    std::size_t samples = 0;
    std::size_t pa_gt_pb = 0;
    std::size_t distance_smaller = 0;
};

struct OrderingReport {
    std::size_t trials = 0;
    std::size_t vector_len = 0;
    std::size_t distance_smaller = 0;  // l(f_pi, fM) < l(f_pi, fF)
    std::size_t dot_positive = 0;      // f_pi . (fM - fF) > 0
    std::vector<OrderingCell> cells;      // sorted by (c1, c2)
};

/// Samples random binary triples (f_pi, fM, fF) with ||fM||_0 > ||fF||_0 and
/// tallies the distance and dot-product events overall and per (c1, c2).
OrderingReport verify_feature_ordering(std::size_t trials, std::size_t vector_len, std::uint64_t seed);

}  // namespace roadtrack
