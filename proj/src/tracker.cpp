#include "roadtrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

namespace roadtrack {

std::string_view to_string(MotionModelKind k) {
    switch (k) {
        case MotionModelKind::constant_velocity: return "constant_velocity";
        case MotionModelKind::rvo_only: return "rvo_only";
        case MotionModelKind::simcai: return "simcai";
    }
    return "?";
}

MotionModelKind motion_model_from_string(std::string_view name) {
    if (name == "constant_velocity" || name == "const_vel") return MotionModelKind::constant_velocity;
    if (name == "rvo_only" || name == "rvo") return MotionModelKind::rvo_only;
    if (name == "simcai") return MotionModelKind::simcai;
    throw std::invalid_argument("unknown motion model: " + std::string(name));
}

void TrackerConfig::validate() const {
    assoc.validate();
    orca.validate();
    interaction.validate();
    if (!(px_per_meter > 0.0)) throw std::invalid_argument("px_per_meter must be positive");
    if (!(velocity_smoothing > 0.0 && velocity_smoothing <= 1.0))
        throw std::invalid_argument("velocity_smoothing must lie in (0, 1]");
    if (coast_output_frames < 0 || coast_output_frames > assoc.max_age)
        throw std::invalid_argument("coast_output_frames must lie in [0, max_age]");
}

Tracker::Tracker(TrackerConfig cfg)
    : cfg_(std::move(cfg)), simcai_(cfg_.interaction, cfg_.orca) {
    cfg_.validate();
    mm_.px_per_meter = cfg_.px_per_meter;
    mm_.dt = cfg_.orca.dt;
    mm_.velocity_smoothing = cfg_.velocity_smoothing;
}

void Tracker::predict() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    if (cfg_.motion == MotionModelKind::constant_velocity) {
        for (auto& t : tracks_) t.state.position += t.state.velocity * cfg_.orca.dt;
    } else if (!tracks_.empty()) {
        std::vector<AgentState> states;
        states.reserve(tracks_.size());
        for (const auto& t : tracks_) states.push_back(t.state);
        std::vector<AgentState> next;
        if (cfg_.motion == MotionModelKind::rvo_only) {
            next = predict_orca(states, cfg_.orca);
        } else {
            next = simcai_.step(states).agents;
        }
        for (std::size_t i = 0; i < tracks_.size(); ++i) tracks_[i].state = next[i];
    }
    for (auto& t : tracks_) {
        t.bbox = bbox_at_center(t.state.position * cfg_.px_per_meter, t.bbox.w, t.bbox.h);
    }
    last_predict_seconds_ += std::chrono::duration<double>(clock::now() - t0).count();
}

std::vector<OutputRow> Tracker::step_one(int frame, std::span<const Detection> detections) {
    predict();
    const auto res = update_tracks(tracks_, detections, cfg_.assoc, mm_, frame, next_id_);
    stats_ += res.stats;
    if (cfg_.motion == MotionModelKind::simcai) {
        std::vector<AgentState> observed;
        observed.reserve(tracks_.size());
        for (const auto& t : tracks_) observed.push_back(t.state);
        simcai_.observe(observed);
    }
    last_frame_ = frame;

    std::vector<OutputRow> rows;
    for (const auto& t : tracks_) {
        if (t.status != TrackStatus::confirmed) continue;
        if (t.age_since_update > cfg_.coast_output_frames) continue;
        rows.push_back({frame, t.id, t.bbox});
    }
    std::sort(rows.begin(), rows.end(),
              [](const OutputRow& a, const OutputRow& b) { return a.id < b.id; });
    return rows;
}

std::vector<OutputRow> Tracker::step(const FramePacket& packet) {
    if (packet.frame <= last_frame_) {
        throw std::invalid_argument("frame " + std::to_string(packet.frame) +
                                    " is not after frame " + std::to_string(last_frame_));
    }
    last_predict_seconds_ = 0.0;
    std::vector<OutputRow> rows;
    if (last_frame_ > 0) {
        for (int f = last_frame_ + 1; f < packet.frame; ++f) {
            auto gap = step_one(f, {});
            rows.insert(rows.end(), gap.begin(), gap.end());
        }
    }
    auto cur = step_one(packet.frame, packet.detections);
    rows.insert(rows.end(), cur.begin(), cur.end());
    return rows;
}

RunResult run(std::span<const FramePacket> packets, const TrackerConfig& cfg) {
    using clock = std::chrono::steady_clock;
    Tracker tracker(cfg);
    RunResult out;
    out.frames.reserve(packets.size());
    out.frame_us.reserve(packets.size());
    out.predict_us.reserve(packets.size());
    for (const auto& p : packets) {
        std::vector<OutputRow> rows;
        const auto t0 = clock::now();
        try {
            rows = tracker.step(p);
        } catch (const std::exception& e) {
            throw std::runtime_error("frame " + std::to_string(p.frame) + ": " + e.what());
        }
        const double us = std::chrono::duration<double, std::micro>(clock::now() - t0).count();
        out.frames.push_back(p.frame);
        out.frame_us.push_back(us);
        out.predict_us.push_back(tracker.last_predict_seconds() * 1e6);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    out.stats = tracker.stats();
    return out;
}

}  // namespace roadtrack
