#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roadtrack/geometry.hpp"
#include "support.hpp"

using namespace roadtrack;

TEST_CASE("iou examples") {
    const BBox a{0, 0, 2, 2};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, BBox{10, 10, 2, 2}) == 0.0);
    CHECK(iou(a, BBox{1, 0, 2, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("iou matches a unit-cell count on integer boxes") {
    testing::Gen g(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const BBox a{double(g.integer(0, 20)), double(g.integer(0, 20)), double(g.integer(1, 10)),
                     double(g.integer(1, 10))};
        const BBox b{double(g.integer(0, 20)), double(g.integer(0, 20)), double(g.integer(1, 10)),
                     double(g.integer(1, 10))};
        int inter = 0;
        int uni = 0;
        for (int x = 0; x < 32; ++x) {
            for (int y = 0; y < 32; ++y) {
                const bool in_a = x >= a.u && x < a.right() && y >= a.v && y < a.bottom();
                const bool in_b = x >= b.u && x < b.right() && y >= b.v && y < b.bottom();
                inter += in_a && in_b;
                uni += in_a || in_b;
            }
        }
        REQUIRE(iou(a, b) == doctest::Approx(double(inter) / uni).epsilon(1e-12));
    }
}

TEST_CASE("iou is symmetric and self-overlap is one") {
    testing::Gen g(12);
    for (int trial = 0; trial < 10000; ++trial) {
        const BBox a = g.box();
        const BBox b = g.box();
        REQUIRE(iou(a, b) == iou(b, a));
        REQUIRE(iou(a, a) == 1.0);
        REQUIRE(iou(a, b) >= 0.0);
        REQUIRE(iou(a, b) <= 1.0);
    }
}

TEST_CASE("bbox center") {
    CHECK(bbox_center(BBox{10, 20, 4, 6}) == Vec2{12, 23});
    CHECK(bbox_center(BBox{0, 0, 2, 2}) == Vec2{1, 1});
    CHECK(bbox_center(BBox{-3, -3, 6, 6}) == Vec2{0, 0});
    CHECK(bbox_at_center({12, 23}, 4, 6) == BBox{10, 20, 4, 6});
}

TEST_CASE("ray circle discriminant examples") {
    CHECK(ray_circle_discriminant({0, 0}, 0.0, Circle{{5, 0}, 1}) > 0.0);
    CHECK(ray_circle_discriminant({0, 0}, 0.0, Circle{{5, 2}, 1}) < 0.0);
    CHECK(ray_circle_discriminant({0, 0}, std::numbers::pi / 4, Circle{{4, 4}, 0.5}) > 0.0);
    // Vertical line: handled with swapped axes.
    CHECK(ray_circle_discriminant({0, 0}, std::numbers::pi / 2, Circle{{0, 5}, 1}) > 0.0);
    CHECK(ray_circle_discriminant({0, 0}, std::numbers::pi / 2, Circle{{3, 5}, 1}) < 0.0);
}

TEST_CASE("discriminant sign agrees with perpendicular distance") {
    testing::Gen g(13);
    int checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const Vec2 apex = g.vec(-10, 10);
        const double angle = g.real(-std::numbers::pi, std::numbers::pi);
        const Circle c{g.vec(-10, 10), g.real(0.1, 3.0)};
        const double d = perp_distance(apex, angle, c.center);
        if (std::abs(d - c.radius) < 1e-9) continue;  // boundary band
        ++checked;
        REQUIRE((ray_circle_discriminant(apex, angle, c) >= 0.0) == (d <= c.radius));
    }
    CHECK(checked > 9900);
}

TEST_CASE("ray side product examples") {
    const Cone2D cone{{0, 0}, 0.0, std::numbers::pi / 6};
    CHECK(ray_side_product(cone, {5, 0}) < 0.0);
    CHECK(ray_side_product(cone, {0, 5}) > 0.0);
    const Vec2 on_ray = unit_from_angle(std::numbers::pi / 6) * 4.0;
    CHECK(std::abs(ray_side_product(cone, on_ray)) < 1e-12);
    CHECK_THROWS_AS(ray_side_product(cone, {0, 0}), GeometryError);
}

TEST_CASE("ray side product sign agrees with the angle to the heading") {
    testing::Gen g(14);
    int checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const Cone2D cone{g.vec(-5, 5), g.real(-std::numbers::pi, std::numbers::pi),
                          g.real(0.05, std::numbers::pi / 2 - 0.05)};
        const Vec2 p = g.vec(-10, 10);
        const Vec2 rel = p - cone.apex;
        const Vec2 heading = unit_from_angle(cone.heading);
        if (dot(rel, heading) <= 0.0) continue;  // forward half-plane only
        const double angle = std::atan2(std::abs(cross(heading, rel)), dot(heading, rel));
        if (std::abs(angle - cone.half_angle) < 1e-9) continue;
        ++checked;
        REQUIRE((ray_side_product(cone, p) <= 0.0) == (angle <= cone.half_angle));
        REQUIRE(in_forward_cone(cone, p) == (angle <= cone.half_angle));
    }
    CHECK(checked > 4000);
}

TEST_CASE("perpendicular distance") {
    CHECK(perp_distance({0, 0}, 0.0, {3, 4}) == doctest::Approx(4.0));
    CHECK(perp_distance({0, 0}, 0.0, {7, 0}) == 0.0);
    CHECK(perp_distance({0, 0}, std::numbers::pi / 4, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("forward ray misses a disc behind the apex") {
    CHECK(forward_ray_hits_disc({0, 0}, 0.0, Circle{{5, 0}, 1}));
    CHECK_FALSE(forward_ray_hits_disc({0, 0}, 0.0, Circle{{-5, 0}, 1}));
    CHECK(forward_ray_hits_disc({0, 0}, 0.0, Circle{{0, 0.5}, 1}));
}
