#include <doctest.h>

#include <algorithm>

#include "roadtrack/experiments.hpp"
#include "roadtrack/tracker.hpp"
#include "support.hpp"

using namespace roadtrack;

namespace {

Detection det_at(int frame, Vec2 center) {
    Detection d;
    d.frame = frame;
    d.bbox = bbox_at_center(center, 12, 18);
    d.mask = ellipse_mask(d.bbox);
    return d;
}

// One pedestrian moving at `v_px` pixels per frame, optionally missing some frames.
std::vector<FramePacket> mover(int frames, Vec2 start, Vec2 v_px, std::vector<int> missing = {}) {
    std::vector<FramePacket> out;
    for (int f = 1; f <= frames; ++f) {
        FramePacket p{f, {}};
        if (std::find(missing.begin(), missing.end(), f) == missing.end())
            p.detections.push_back(det_at(f, start + v_px * (f - 1)));
        out.push_back(p);
    }
    return out;
}

ScenarioSpec crossing() {
    ScenarioSpec s;
    s.name = "crossing";
    s.duration_frames = 150;
    s.fps = 30;
    s.world_size = {20, 20};
    ScenarioAgent a;
    a.spawn = {2, 10};
    a.goals = {{18, 10}};
    ScenarioAgent b;
    b.spawn = {10, 2};
    b.goals = {{10, 18}};
    s.agents = {a, b};
    s.camera = {20, 400, 400};
    return s;
}

}  // namespace

TEST_CASE("first frame makes tentative tracks only") {
    Tracker t(TrackerConfig{});
    const FramePacket p{1, {det_at(1, {50, 50}), det_at(1, {150, 50}), det_at(1, {250, 50})}};
    CHECK(t.step(p).empty());
    CHECK(t.tracks().size() == 3);
    for (const auto& tr : t.tracks()) CHECK(tr.status == TrackStatus::tentative);
}

TEST_CASE("empty frames age tracks and dead tracks never report") {
    TrackerConfig cfg;
    cfg.assoc.max_age = 4;
    Tracker t(cfg);
    for (const auto& p : mover(5, {50, 50}, {2, 0})) t.step(p);
    REQUIRE(t.tracks().size() == 1);
    for (int f = 6; f <= 6 + cfg.assoc.max_age; ++f) {
        const auto rows = t.step(FramePacket{f, {}});
        if (!t.tracks().empty()) CHECK(t.tracks()[0].age_since_update == f - 5);
        for (const auto& r : rows) CHECK(f - 5 <= cfg.coast_output_frames);
    }
    CHECK(t.tracks().empty());
}

TEST_CASE("constant velocity prediction advances by v dt") {
    TrackerConfig cfg;
    cfg.motion = MotionModelKind::constant_velocity;
    cfg.velocity_smoothing = 1.0;
    Tracker t(cfg);
    for (const auto& p : mover(6, {50, 50}, {3, 1})) t.step(p);
    Vec2 prev = bbox_center(t.tracks()[0].bbox);
    for (int f = 7; f <= 9; ++f) {
        t.step(FramePacket{f, {}});
        const Vec2 c = bbox_center(t.tracks()[0].bbox);
        CHECK(c.x - prev.x == doctest::Approx(3.0));
        CHECK(c.y - prev.y == doctest::Approx(1.0));
        prev = c;
    }
}

TEST_CASE("frames must increase; gaps run as empty frames") {
    Tracker t(TrackerConfig{});
    t.step(FramePacket{3, {det_at(3, {50, 50})}});
    CHECK_THROWS_AS(t.step(FramePacket{3, {}}), std::invalid_argument);
    t.step(FramePacket{6, {det_at(6, {50, 50})}});
    CHECK(t.last_frame() == 6);
    CHECK(t.tracks().size() == 1);  // the tentative track died in frame 4; a new one was born
    CHECK(t.tracks()[0].id == 2);
}

TEST_CASE("a short occlusion keeps the id") {
    for (MotionModelKind m : {MotionModelKind::simcai, MotionModelKind::rvo_only, MotionModelKind::constant_velocity}) {
        TrackerConfig cfg;
        cfg.motion = m;
        const auto packets = mover(30, {40, 80}, {2, 0}, {15, 16});
        const RunResult r = run(packets, cfg);
        for (const auto& row : r.rows) CHECK(row.id == 1);
        CHECK(r.rows.back().frame == 30);
    }
}

TEST_CASE("motion models agree when their predictions coincide") {
    // A lone straight-line mover: ORCA and the interaction model both reduce to v * dt.
    const auto packets = mover(40, {40, 80}, {1, 0.5}, {20});  // 1.7 m/s, under the speed cap
    TrackerConfig cfg;
    cfg.motion = MotionModelKind::constant_velocity;
    const auto cv = run(packets, cfg).rows;
    cfg.motion = MotionModelKind::rvo_only;
    const auto rvo = run(packets, cfg).rows;
    cfg.motion = MotionModelKind::simcai;
    const auto sim = run(packets, cfg).rows;
    REQUIRE(cv.size() == rvo.size());
    REQUIRE(cv.size() == sim.size());
    for (std::size_t i = 0; i < cv.size(); ++i) {
        CHECK(cv[i].id == rvo[i].id);
        CHECK(cv[i].id == sim[i].id);
        CHECK(iou(cv[i].bbox, rvo[i].bbox) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(iou(cv[i].bbox, sim[i].bbox) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("crossing pair is tracked without id switches") {
    const SequenceData data = generate(crossing(), 1);
    const auto gt = gt_entries(data.gt);
    TrackerConfig cfg = config_for(data.gt, TrackerConfig{});
    const RunResult sim = run(data.packets, cfg);
    const MetricsReport rs = evaluate(gt, hyp_entries(sim.rows), EvalConfig{});
    CHECK(rs.ids == 0);

    cfg.motion = MotionModelKind::constant_velocity;
    const MetricsReport rc = evaluate(gt, hyp_entries(run(data.packets, cfg).rows), EvalConfig{});
    CHECK(rc.fn >= rs.fn);
}

TEST_CASE("runs are deterministic and rows sorted") {
    const SequenceData data = generate(crossing(), 3);
    const TrackerConfig cfg = config_for(data.gt, TrackerConfig{});
    const auto a = run(data.packets, cfg);
    const auto b = run(data.packets, cfg);
    CHECK(a.rows == b.rows);
    CHECK(std::is_sorted(a.rows.begin(), a.rows.end(), [](const OutputRow& x, const OutputRow& y) {
        return x.frame != y.frame ? x.frame < y.frame : x.id < y.id;
    }));
}

TEST_CASE("motion model names") {
    CHECK(motion_model_from_string("const_vel") == MotionModelKind::constant_velocity);
    CHECK(motion_model_from_string("rvo") == MotionModelKind::rvo_only);
    CHECK(to_string(MotionModelKind::simcai) == "simcai");
    CHECK_THROWS_AS(motion_model_from_string("kalman"), std::invalid_argument);
}
