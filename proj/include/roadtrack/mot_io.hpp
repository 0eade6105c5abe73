#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roadtrack/detection.hpp"
#include "roadtrack/metrics.hpp"
#include "roadtrack/scenario.hpp"
#include "roadtrack/tracker.hpp"

namespace roadtrack {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a whole field; throws FormatError.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// frame, id, bb_left, bb_top, bb_width, bb_height, conf, x, y, z
struct MotRow {
    int frame = 1;
    int id = -1;
    BBox bbox;
    double conf = 1.0;
    double x = -1.0;
    double y = -1.0;
    double z = -1.0;
    bool operator==(const MotRow&) const = default;
};

/// '#' lines of the form "# key=value" are kept as header entries; other
/// comment lines are ignored.
struct MotFile {
    std::map<std::string, std::string> header;
    std::vector<MotRow> rows;

    std::optional<double> header_double(const std::string& key) const;
    bool operator==(const MotFile&) const = default;
};

void write_mot(std::ostream& os, const MotFile& f);
/// Throws FormatError naming the line.
MotFile read_mot(std::istream& is);

/// frame, det_index, rows, cols, run lengths (space separated)
struct MaskRow {
    int frame = 1;
    int det_index = 0;
    RleMask mask;
    bool operator==(const MaskRow&) const = default;
};

void write_masks(std::ostream& os, const std::vector<MaskRow>& rows);
std::vector<MaskRow> read_masks(std::istream& is);

// Conversions between in-memory structures and files.

/// conf is 0 for stationary rows and 1 otherwise, x holds the agent type index.
MotFile gt_to_mot(const GtSequence& gt);
std::vector<GroundTruthEntry> mot_to_gt(const MotFile& f);

/// det_index is the position of the detection within its frame.
std::pair<MotFile, std::vector<MaskRow>> detections_to_mot(const std::vector<FramePacket>& packets,
                                                          const GtSequence& gt);
/// Rebuilds packets, attaching masks when `masks` is given. A "frames" header
/// entry extends the sequence with trailing empty frames.
std::vector<FramePacket> mot_to_packets(const MotFile& f, const std::vector<MaskRow>* masks);

MotFile tracks_to_mot(const std::vector<OutputRow>& rows, const std::map<std::string, std::string>& header);
std::vector<HypothesisEntry> mot_to_hyp(const MotFile& f);

}  // namespace roadtrack
