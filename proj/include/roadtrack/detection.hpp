#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "roadtrack/geometry.hpp"

namespace roadtrack {

/// Binary raster stored as alternating run lengths, starting with a 0-run
/// (which may be empty). Runs always sum to rows * cols.
struct RleMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint32_t> runs;

    static RleMask encode(std::span<const std::uint8_t> bits, std::size_t rows, std::size_t cols);
    std::vector<std::uint8_t> decode() const;
    std::size_t count_ones() const;
    /// Throws std::invalid_argument when the runs do not cover rows * cols.
    void validate() const;
    bool operator==(const RleMask&) const = default;
};

/// One per-frame observation. The mask, when present, rasterizes the bbox extent.
struct Detection {
    int frame = 1;
    BBox bbox;
    std::optional<RleMask> mask;
    double confidence = 1.0;
};

}  // namespace roadtrack
