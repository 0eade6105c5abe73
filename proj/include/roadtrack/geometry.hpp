#pragma once

#include <cmath>
#include <stdexcept>

namespace roadtrack {

/// Ground-plane point or velocity, in meters (or m/s).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3-D cross product; > 0 when b is counter-clockwise of a.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double abs_sq(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : Vec2{};
}
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Image-space box: (u, v) is the top-left corner, all values in pixels.
struct BBox {
    double u = 0.0;
    double v = 0.0;
    double w = 1.0;
    double h = 1.0;

    bool valid() const { return w > 0.0 && h > 0.0 && std::isfinite(u) && std::isfinite(v); }
    double area() const { return w * h; }
    double right() const { return u + w; }
    double bottom() const { return v + h; }
    bool operator==(const BBox&) const = default;
};

struct Circle {
    Vec2 center;
    double radius = 1.0;
};

/// Steering cone: rays at heading +/- half_angle from the apex.
struct Cone2D {
    Vec2 apex;
    double heading = 0.0;
    double half_angle = 0.5;
};

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double iou(const BBox& a, const BBox& b);
double intersection_area(const BBox& a, const BBox& b);

/// Geometric center (u + w/2, v + h/2).
Vec2 bbox_center(const BBox& b);
BBox bbox_at_center(const Vec2& center, double w, double h);

/// Discriminant of the line through `apex` with direction angle `slope_angle`
/// intersected with circle `c`; >= 0 iff the infinite line meets the circle.
/// Near-vertical lines are solved with the axes swapped.
double ray_circle_discriminant(const Vec2& apex, double slope_angle, const Circle& c);

/// True when the forward ray (parameter s >= 0) touches the closed disc.
bool forward_ray_hits_disc(const Vec2& apex, double angle, const Circle& c);

/// Product of the signed side residuals of p against the two cone rays;
/// <= 0 iff p lies in the wedge between the boundary lines.
/// Throws GeometryError when p coincides with the apex.
double ray_side_product(const Cone2D& cone, const Vec2& p);

/// True when p is in the closed forward sector of the cone.
bool in_forward_cone(const Cone2D& cone, const Vec2& p);

/// Euclidean distance from p to the infinite line through `line_apex` at `slope_angle`.
double perp_distance(const Vec2& line_apex, double slope_angle, const Vec2& p);

}  // namespace roadtrack
