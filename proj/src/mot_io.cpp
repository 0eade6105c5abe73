#include "roadtrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace roadtrack {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw FormatError("not a number: '" + std::string(s) + "'");
    return v;
}

long long parse_int(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw FormatError("not an integer: '" + std::string(s) + "'");
    return v;
}

std::optional<double> MotFile::header_double(const std::string& key) const {
    const auto it = header.find(key);
    if (it == header.end()) return std::nullopt;
    return parse_double(it->second);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void write_header(std::ostream& os, const std::map<std::string, std::string>& header) {
    for (const auto& [k, v] : header) os << "# " << k << '=' << v << '\n';
}

// Returns true when the line was a comment (header entries are captured).
bool consume_comment(std::string_view line, std::map<std::string, std::string>* header) {
    if (line.empty() || line.front() != '#') return false;
    if (header) {
        std::string_view body = line.substr(1);
        while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        const auto eq = body.find('=');
        if (eq != std::string_view::npos && eq > 0 && body.substr(0, eq).find(' ') == std::string_view::npos) {
            std::string_view value = body.substr(eq + 1);
            while (!value.empty() && value.back() == '\r') value.remove_suffix(1);
            (*header)[std::string(body.substr(0, eq))] = std::string(value);
        }
    }
    return true;
}

std::string trim_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

void write_mot(std::ostream& os, const MotFile& f) {
    write_header(os, f.header);
    for (const auto& r : f.rows) {
        os << r.frame << ',' << r.id << ',' << format_double(r.bbox.u) << ',' << format_double(r.bbox.v) << ','
           << format_double(r.bbox.w) << ',' << format_double(r.bbox.h) << ',' << format_double(r.conf) << ','
           << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.z) << '\n';
    }
}

MotFile read_mot(std::istream& is) {
    MotFile f;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = trim_cr(raw);
        if (line.empty() || consume_comment(line, &f.header)) continue;
        const auto fields = split(line, ',');
        try {
            if (fields.size() < 6 || fields.size() > 10) throw FormatError("expected 6 to 10 fields");
            MotRow r;
            r.frame = static_cast<int>(parse_int(fields[0]));
            r.id = static_cast<int>(parse_int(fields[1]));
            r.bbox = {parse_double(fields[2]), parse_double(fields[3]), parse_double(fields[4]),
                      parse_double(fields[5])};
            if (fields.size() > 6) r.conf = parse_double(fields[6]);
            if (fields.size() > 7) r.x = parse_double(fields[7]);
            if (fields.size() > 8) r.y = parse_double(fields[8]);
            if (fields.size() > 9) r.z = parse_double(fields[9]);
            if (r.frame < 1) throw FormatError("frame must be >= 1");
            if (!r.bbox.valid()) throw FormatError("invalid box");
            f.rows.push_back(r);
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return f;
}

void write_masks(std::ostream& os, const std::vector<MaskRow>& rows) {
    for (const auto& r : rows) {
        os << r.frame << ',' << r.det_index << ',' << r.mask.rows << ',' << r.mask.cols << ',';
        for (std::size_t i = 0; i < r.mask.runs.size(); ++i) os << (i ? " " : "") << r.mask.runs[i];
        os << '\n';
    }
}

std::vector<MaskRow> read_masks(std::istream& is) {
    std::vector<MaskRow> out;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = trim_cr(raw);
        if (line.empty() || consume_comment(line, nullptr)) continue;
        try {
            const auto fields = split(line, ',');
            if (fields.size() != 5) throw FormatError("expected 5 fields");
            MaskRow r;
            r.frame = static_cast<int>(parse_int(fields[0]));
            r.det_index = static_cast<int>(parse_int(fields[1]));
            const long long rows = parse_int(fields[2]);
            const long long cols = parse_int(fields[3]);
            if (rows < 1 || cols < 1) throw FormatError("mask must be at least 1x1");
            r.mask.rows = static_cast<std::size_t>(rows);
            r.mask.cols = static_cast<std::size_t>(cols);
            for (auto tok : split(fields[4], ' ')) {
                if (tok.empty()) continue;
                const long long run = parse_int(tok);
                if (run < 0) throw FormatError("negative run length");
                r.mask.runs.push_back(static_cast<std::uint32_t>(run));
            }
            r.mask.validate();
            out.push_back(std::move(r));
        } catch (const std::invalid_argument& e) {
            throw FormatError("mask line " + std::to_string(lineno) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("mask line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

namespace {

std::map<std::string, std::string> sequence_header(const GtSequence& gt) {
    return {{"fps", format_double(gt.fps)},
            {"frames", std::to_string(gt.frames)},
            {"image_height", std::to_string(gt.image_height)},
            {"image_width", std::to_string(gt.image_width)},
            {"px_per_meter", format_double(gt.px_per_meter)}};
}

}  // namespace

MotFile gt_to_mot(const GtSequence& gt) {
    MotFile f;
    f.header = sequence_header(gt);
    for (const auto& r : gt.rows) {
        f.rows.push_back({r.frame, r.gt_id, r.bbox, r.stationary ? 0.0 : 1.0,
                          static_cast<double>(static_cast<int>(r.type)), -1.0, -1.0});
    }
    return f;
}

std::vector<GroundTruthEntry> mot_to_gt(const MotFile& f) {
    std::vector<GroundTruthEntry> out;
    for (const auto& r : f.rows) {
        GroundTruthEntry g;
        g.frame = r.frame;
        g.gt_id = r.id;
        g.bbox = r.bbox;
        const int t = static_cast<int>(r.x);
        g.type = (t >= 0 && t <= 5) ? static_cast<AgentType>(t) : AgentType::pedestrian;
        g.stationary = r.conf == 0.0;
        out.push_back(g);
    }
    return out;
}

std::pair<MotFile, std::vector<MaskRow>> detections_to_mot(const std::vector<FramePacket>& packets,
                                                          const GtSequence& gt) {
    MotFile f;
    f.header = sequence_header(gt);
    std::vector<MaskRow> masks;
    for (const auto& p : packets) {
        for (std::size_t i = 0; i < p.detections.size(); ++i) {
            const auto& d = p.detections[i];
            f.rows.push_back({p.frame, -1, d.bbox, d.confidence, -1.0, -1.0, -1.0});
            if (d.mask) masks.push_back({p.frame, static_cast<int>(i), *d.mask});
        }
    }
    return {std::move(f), std::move(masks)};
}

std::vector<FramePacket> mot_to_packets(const MotFile& f, const std::vector<MaskRow>* masks) {
    std::map<int, FramePacket> by_frame;
    for (const auto& r : f.rows) {
        auto& p = by_frame[r.frame];
        p.frame = r.frame;
        Detection d;
        d.frame = r.frame;
        d.bbox = r.bbox;
        d.confidence = r.conf;
        p.detections.push_back(std::move(d));
    }
    if (masks) {
        for (const auto& m : *masks) {
            auto it = by_frame.find(m.frame);
            if (it == by_frame.end() || m.det_index < 0 ||
                static_cast<std::size_t>(m.det_index) >= it->second.detections.size()) {
                throw FormatError("mask for frame " + std::to_string(m.frame) + " index " +
                                  std::to_string(m.det_index) + " has no detection");
            }
            it->second.detections[static_cast<std::size_t>(m.det_index)].mask = m.mask;
        }
    }
    std::vector<FramePacket> out;
    for (auto& [frame, p] : by_frame) out.push_back(std::move(p));
    if (const auto frames = f.header_double("frames")) {
        const int last = out.empty() ? 0 : out.back().frame;
        for (int fr = last + 1; fr <= static_cast<int>(*frames); ++fr) out.push_back({fr, {}});
    }
    return out;
}

MotFile tracks_to_mot(const std::vector<OutputRow>& rows, const std::map<std::string, std::string>& header) {
    MotFile f;
    f.header = header;
    for (const auto& r : rows) f.rows.push_back({r.frame, static_cast<int>(r.id), r.bbox, 1.0, -1.0, -1.0, -1.0});
    return f;
}

std::vector<HypothesisEntry> mot_to_hyp(const MotFile& f) {
    std::vector<HypothesisEntry> out;
    for (const auto& r : f.rows) out.push_back({r.frame, r.id, r.bbox});
    return out;
}

}  // namespace roadtrack
