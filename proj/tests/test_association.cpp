#include <doctest.h>

#include <algorithm>
#include <set>

#include "roadtrack/association.hpp"
#include "roadtrack/scenario.hpp"
#include "support.hpp"

using namespace roadtrack;

namespace {

Detection det_at(Vec2 center, double w = 12, double h = 18) {
    Detection d;
    d.bbox = bbox_at_center(center, w, h);
    d.mask = ellipse_mask(d.bbox);
    return d;
}

Track track_at(Vec2 center, const AssocConfig& cfg) {
    Track t;
    t.id = 1;
    t.bbox = bbox_at_center(center, 12, 18);
    t.gallery.push_back(feature_from_detection(det_at(center), cfg.feature_kind));
    t.last_center_px = center;
    return t;
}

}  // namespace

TEST_CASE("gate is an inclusive radius test") {
    AssocConfig cfg;
    cfg.gating_radius = 50.0;
    const Track t = track_at({100, 100}, cfg);
    const std::vector<Detection> dets{det_at({130, 100}), det_at({100, 149.9}), det_at({49.9, 100}),
                                      det_at({100, 100})};
    CHECK(gate(t, dets, {}, cfg) == std::vector<std::size_t>{0, 1, 3});
    CHECK(gate(t, dets, {false, true, false, false}, cfg) == std::vector<std::size_t>{0, 3});
    CHECK(gate(t, std::vector<Detection>{det_at({300, 300})}, {}, cfg).empty());
    const std::vector<Detection> edge{det_at({150, 100})};
    CHECK(gate(t, edge, {}, cfg) == std::vector<std::size_t>{0});
}

TEST_CASE("best cosine is the linear-scan minimum") {
    testing::Gen g(61);
    AssocConfig cfg;
    Track t = track_at({0, 0}, cfg);
    const std::vector<std::size_t> one{0};
    const std::vector<BinaryFeature> same{t.gallery.front()};
    const CosineMatch m = best_cosine(t, one, same);
    CHECK(m.detection == 0);
    CHECK(m.distance == 0.0);
    CHECK_THROWS_AS(best_cosine(t, {}, same), std::invalid_argument);

    for (int trial = 0; trial < 500; ++trial) {
        t.gallery.clear();
        for (int k = g.integer(1, 4); k > 0; --k) {
            BinaryFeature f;
            f.rows = 4;
            f.cols = 4;
            f.bits = g.bits(16);
            f.bits[0] = 1;
            t.gallery.push_back(f);
        }
        std::vector<BinaryFeature> feats(g.integer(1, 6));
        std::vector<std::size_t> cand;
        for (std::size_t j = 0; j < feats.size(); ++j) {
            feats[j] = t.gallery.front();
            feats[j].bits = g.bits(16);
            feats[j].bits[1] = 1;
            cand.push_back(j);
        }
        std::size_t want = 0;
        double want_d = 2.0;
        for (std::size_t j : cand) {
            double d = 2.0;
            for (const auto& gf : t.gallery) d = std::min(d, cosine_distance(gf, feats[j]));
            if (d < want_d) {
                want = j;
                want_d = d;
            }
        }
        const CosineMatch got = best_cosine(t, cand, feats);
        REQUIRE(got.detection == want);
        REQUIRE(got.distance == doctest::Approx(want_d));
    }
}

TEST_CASE("combined score") {
    AssocConfig cfg;
    Track t;
    t.bbox = {0, 0, 10, 10};
    Detection d;
    d.bbox = {0, 0, 6, 10};
    CHECK(combined_score(t, d, 0.2, cfg) == doctest::Approx(0.7));
    d.bbox = t.bbox;
    CHECK(combined_score(t, d, 0.0, cfg) == doctest::Approx(1.0));
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 0.0;
    d.bbox = {50, 50, 3, 3};
    CHECK(combined_score(t, d, 0.25, cfg) == doctest::Approx(0.75));
}

TEST_CASE("config validation") {
    AssocConfig cfg;
    cfg.lambda1 = 0.7;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.max_age = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("track lifecycle") {
    AssocConfig cfg;
    cfg.max_age = 5;
    MeasurementModel mm;
    std::vector<Track> tracks;
    TrackId next = 1;

    // Birth, then confirmation on the third consecutive hit.
    for (int f = 1; f <= 3; ++f) {
        const std::vector<Detection> dets{det_at({100.0 + f, 100})};
        const auto r = update_tracks(tracks, dets, cfg, mm, f, next);
        REQUIRE(tracks.size() == 1);
        CHECK(tracks[0].id == 1);
        CHECK(tracks[0].age_since_update == 0);
        CHECK(tracks[0].status == (f < 3 ? TrackStatus::tentative : TrackStatus::confirmed));
        CHECK(r.stats.births == (f == 1 ? 1u : 0u));
    }
    CHECK(tracks[0].state.velocity.x == doctest::Approx(1.0 / (mm.dt * mm.px_per_meter)));

    // Unmatched: survives max_age frames, destroyed on the next.
    for (int f = 4; f < 4 + cfg.max_age; ++f) {
        update_tracks(tracks, {}, cfg, mm, f, next);
        REQUIRE(tracks.size() == 1);
        CHECK(tracks[0].age_since_update == f - 3);
    }
    const auto r = update_tracks(tracks, {}, cfg, mm, 4 + cfg.max_age, next);
    CHECK(tracks.empty());
    CHECK(r.stats.lost_tracks == 1);

    // A fresh detection gets a new id; ids are never reused.
    update_tracks(tracks, std::vector<Detection>{det_at({100, 100})}, cfg, mm, 20, next);
    CHECK(tracks[0].id == 2);

    // Tentative tracks die on their first miss.
    const auto t = update_tracks(tracks, {}, cfg, mm, 21, next);
    CHECK(tracks.empty());
    CHECK(t.stats.tentative_deaths == 1);
}

TEST_CASE("matching is injective and ids increase") {
    testing::Gen g(62);
    AssocConfig cfg;
    MeasurementModel mm;
    std::vector<Track> tracks;
    TrackId next = 1;
    TrackId highest = 0;
    for (int f = 1; f <= 200; ++f) {
        std::vector<Detection> dets;
        for (int k = g.integer(0, 8); k > 0; --k) dets.push_back(det_at(g.vec(0, 200), g.real(8, 14), g.real(15, 22)));
        const auto r = update_tracks(tracks, dets, cfg, mm, f, next);
        std::set<TrackId> ids;
        std::set<std::size_t> used;
        for (const auto& [id, j] : r.matches) {
            REQUIRE(ids.insert(id).second);
            REQUIRE(used.insert(j).second);
        }
        for (const auto& t : tracks) {
            if (t.id > highest) {
                REQUIRE(t.hits == 1);
                highest = t.id;
            }
            REQUIRE(t.status != TrackStatus::dead);
        }
        REQUIRE(r.stats.births + r.matches.size() == dets.size());
    }
    CHECK(next == highest + 1);
}

TEST_CASE("box shape convention round trip") {
    for (AgentType type : {AgentType::pedestrian, AgentType::car}) {
        const Vec2 e = box_extent_px(type, 0.4, 20.0);
        const auto [t, r] = infer_agent(BBox{0, 0, e.x, e.y}, 20.0);
        CHECK(t == type);
        CHECK(r == doctest::Approx(0.4));
    }
}
