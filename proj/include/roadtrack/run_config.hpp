#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadtrack/metrics.hpp"
#include "roadtrack/scenario.hpp"
#include "roadtrack/tracker.hpp"

namespace roadtrack {

/// Every tunable in one flat record. px_per_meter and fps fall back to the
/// input file header when unset.
struct RunConfig {
    TrackerConfig tracker;
    EvalConfig eval;
    DetectorModel detector;
    std::uint64_t seed = 1;
    std::optional<double> px_per_meter;
    std::optional<double> fps;

    bool operator==(const RunConfig& o) const { return to_text() == o.to_text(); }
    std::string to_text() const;
    /// Tracker config with scale and frame period resolved against a header.
    TrackerConfig resolved(std::optional<double> header_px_per_meter, std::optional<double> header_fps) const;
};

/// Parses "key=value" lines; '#' comments and blank lines are skipped.
/// Unknown keys, duplicates and bad values throw std::invalid_argument naming
/// the line. lambda1 + lambda2 = 1 is checked here.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// All recognised keys, in file order.
std::vector<std::string> run_config_keys();

}  // namespace roadtrack
