#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roadtrack/experiments.hpp"
#include "roadtrack/mot_io.hpp"
#include "roadtrack/run_config.hpp"
#include "support.hpp"

using namespace roadtrack;

namespace {

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

MotFile read_text(const std::string& text) {
    std::istringstream in(text);
    return read_mot(in);
}

}  // namespace

TEST_CASE("doubles print shortest and parse back") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-1.0) == "-1");
    testing::Gen g(3);
    for (int i = 0; i < 5000; ++i) {
        const double v = std::ldexp(g.real(-1, 1), g.integer(-30, 30));
        REQUIRE(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.5x"), FormatError);
    CHECK_THROWS_AS(parse_double(""), FormatError);
    CHECK_THROWS_AS(parse_int("3.0"), FormatError);
    CHECK(parse_int("-7") == -7);
}

TEST_CASE("MOT files round trip") {
    testing::Gen g(8);
    for (int trial = 0; trial < 100; ++trial) {
        MotFile f;
        f.header["fps"] = "30";
        f.header["px_per_meter"] = format_double(g.real(5, 50));
        const int n = g.integer(0, 40);
        for (int i = 0; i < n; ++i) {
            MotRow r;
            r.frame = g.integer(1, 500);
            r.id = g.coin(0.3) ? -1 : g.integer(1, 99);
            r.bbox = {g.real(-50, 800), g.real(-50, 600), g.real(0.5, 90), g.real(0.5, 90)};
            r.conf = g.real(0, 1);
            r.x = g.coin(0.5) ? -1.0 : g.real(0, 5);
            f.rows.push_back(r);
        }
        std::ostringstream out;
        write_mot(out, f);
        REQUIRE(read_text(out.str()) == f);
    }
}

TEST_CASE("MOT reader accepts short rows and skips plain comments") {
    const MotFile f = read_text("# fps=10\n# a note\n\n1,-1,5,6,7,8\r\n2,3,1,1,2,2,0.5\n");
    CHECK(f.header.size() == 1);
    CHECK(f.header_double("fps") == 10.0);
    CHECK_FALSE(f.header_double("px_per_meter").has_value());
    REQUIRE(f.rows.size() == 2);
    CHECK(f.rows[0].bbox == BBox{5, 6, 7, 8});
    CHECK(f.rows[0].conf == 1.0);
    CHECK(f.rows[1].conf == 0.5);
}

TEST_CASE("MOT errors name the line") {
    CHECK(error_of([] { read_text("1,-1,5,6,7,8\n1,-1,5,6\n"); }).find("line 2") != std::string::npos);
    CHECK(error_of([] { read_text("0,-1,5,6,7,8\n"); }).find("line 1") != std::string::npos);
    CHECK(error_of([] { read_text("# x=1\n1,-1,5,6,-7,8\n"); }).find("line 2") != std::string::npos);
    CHECK(error_of([] { read_text("1,-1,a,6,7,8\n"); }).find("line 1") != std::string::npos);
}

TEST_CASE("mask sidecar round trips") {
    testing::Gen g(12);
    std::vector<MaskRow> rows;
    for (int i = 0; i < 60; ++i) {
        const std::size_t r = g.integer(1, 20), c = g.integer(1, 20);
        const auto bits = g.bits(r * c, g.real(0, 1));
        rows.push_back({g.integer(1, 100), g.integer(0, 9), RleMask::encode(bits, r, c)});
    }
    std::stringstream ss;
    write_masks(ss, rows);
    CHECK(read_masks(ss) == rows);

    std::istringstream bad("1,0,2,2,1 1\n");
    CHECK_THROWS_AS(read_masks(bad), FormatError);
}

TEST_CASE("run config text round trips") {
    const RunConfig def;
    CHECK(parse_run_config(def.to_text()) == def);
    CHECK(parse_run_config("") == def);

    // Random overrides drawn from each key's valid range.
    testing::Gen g(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::ostringstream text;
        const double l1 = g.real(0, 1);
        text << "# trial\n";
        text << "motion_model=" << (g.coin() ? "rvo_only" : "constant_velocity") << '\n';
        text << "seed=" << g.integer(0, 1 << 30) << '\n';
        text << "velocity_smoothing=" << format_double(g.real(0.01, 1)) << '\n';
        text << "time_horizon=" << format_double(g.real(0.1, 5)) << '\n';
        text << "tau=" << g.integer(1, 40) << '\n';
        text << "lambda1=" << format_double(l1) << "\nlambda2=" << format_double(1.0 - l1) << '\n';
        text << "count_fp=" << (g.coin() ? "true" : "false") << '\n';
        text << "feature_kind=" << (g.coin() ? "mask" : "bbox_fill") << '\n';
        text << "miss_prob_base=" << format_double(g.real(0, 1)) << '\n';
        const RunConfig cfg = parse_run_config(text.str());
        REQUIRE(parse_run_config(cfg.to_text()) == cfg);
        REQUIRE(cfg.tracker.velocity_smoothing > 0.0);
    }
}

TEST_CASE("run config rejects bad input with line numbers") {
    const auto msg = [](const std::string& text) { return error_of([&] { parse_run_config(text); }); };
    CHECK(msg("tau=3\nwobble=1\n").find("line 2") != std::string::npos);
    CHECK(msg("tau=3\nwobble=1\n").find("wobble") != std::string::npos);
    CHECK(msg("tau=3\n\ntau=4\n").find("duplicate") != std::string::npos);
    CHECK(msg("just words\n").find("line 1") != std::string::npos);
    CHECK(msg("lambda1=0.6\n").find("lambda") != std::string::npos);
    CHECK(msg("max_age=many\n").find("max_age") != std::string::npos);
    CHECK(msg("motion_model=teleport\n") != "");
    const auto keys = run_config_keys();
    CHECK(std::find(keys.begin(), keys.end(), "motion_model") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "min_visibility") != keys.end());
}

TEST_CASE("resolved config takes the header when unset") {
    RunConfig cfg;
    const TrackerConfig t = cfg.resolved(12.5, 10.0);
    CHECK(t.px_per_meter == 12.5);
    CHECK(t.orca.dt == doctest::Approx(0.1));
    cfg.px_per_meter = 40.0;
    CHECK(cfg.resolved(12.5, std::nullopt).px_per_meter == 40.0);
}

TEST_CASE("packets from MOT rows") {
    MotFile f = read_text("# frames=5\n2,-1,0,0,4,4\n2,-1,10,0,4,4\n4,-1,1,1,4,4\n");
    const auto packets = mot_to_packets(f, nullptr);
    // Interior gaps are left to the tracker; the header only pads the tail.
    REQUIRE(packets.size() == 3);
    CHECK(packets[0].frame == 2);
    CHECK(packets[0].detections.size() == 2);
    CHECK(packets[1].frame == 4);
    CHECK(packets[2].frame == 5);
    CHECK(packets[2].detections.empty());
    CHECK_FALSE(packets[0].detections[0].mask.has_value());

    const std::vector<MaskRow> masks{{2, 1, RleMask::encode(std::vector<std::uint8_t>{0, 1, 1, 0}, 2, 2)}};
    const auto with = mot_to_packets(f, &masks);
    CHECK(with[0].detections[1].mask == masks[0].mask);
    const std::vector<MaskRow> orphan{{3, 0, masks[0].mask}};
    CHECK_THROWS_AS(mot_to_packets(f, &orphan), FormatError);
}

TEST_CASE("seed lists") {
    CHECK(parse_seed_list("1-3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(parse_seed_list("5") == std::vector<std::uint64_t>{5});
    CHECK_THROWS(parse_seed_list(""));
    CHECK_THROWS(parse_seed_list("4-2"));
    CHECK_THROWS(parse_seed_list("x"));
}

TEST_CASE("linear fit") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));

    // Against the closed-form normal equations on noisy data.
    testing::Gen g(4);
    std::vector<double> xs, ys;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(g.real(0, 10));
        ys.push_back(3.0 * xs.back() - 2.0 + g.real(-1, 1));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < 50; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double n = 50;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    const LinearFit h = linear_fit(xs, ys);
    CHECK(h.slope == doctest::Approx(slope));
    CHECK(h.intercept == doctest::Approx((sy - slope * sx) / n));
    CHECK(h.r2 == doctest::Approx(r * r));
}
