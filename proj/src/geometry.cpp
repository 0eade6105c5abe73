#include "roadtrack/geometry.hpp"

#include <algorithm>

namespace roadtrack {

double intersection_area(const BBox& a, const BBox& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.u, b.u);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.v, b.v);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
    if (a == b && a.area() > 0.0) return 1.0;  // (u + w) - u need not round back to w
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

Vec2 bbox_center(const BBox& b) { return {b.u + b.w / 2.0, b.v + b.h / 2.0}; }

BBox bbox_at_center(const Vec2& center, double w, double h) {
    return {center.x - w / 2.0, center.y - h / 2.0, w, h};
}

double ray_circle_discriminant(const Vec2& apex, double slope_angle, const Circle& c) {
    const double dx = c.center.x - apex.x;
    const double dy = c.center.y - apex.y;
    const double r2 = c.radius * c.radius;
    const double cs = std::cos(slope_angle);
    const double sn = std::sin(slope_angle);
    // Substituting the line into the circle gives A X^2 + B X + C = 0 with
    // B^2 - 4AC = 4 (rho^2 (1 + t^2) - (t dx - dy)^2), t the slope.
    if (std::abs(cs) >= std::abs(sn)) {
        const double t = sn / cs;
        const double resid = t * dx - dy;
        return 4.0 * (r2 * (1.0 + t * t) - resid * resid);
    }
    // Swapped axes: X - u = cot(delta) (Y - v).
    const double t = cs / sn;
    const double resid = t * dy - dx;
    return 4.0 * (r2 * (1.0 + t * t) - resid * resid);
}

bool forward_ray_hits_disc(const Vec2& apex, double angle, const Circle& c) {
    const Vec2 d = unit_from_angle(angle);
    const Vec2 rel = c.center - apex;
    // |s d - rel|^2 = r^2  ->  s^2 - 2 (d.rel) s + |rel|^2 - r^2 = 0
    const double b = dot(d, rel);
    const double cc = abs_sq(rel) - c.radius * c.radius;
    if (cc <= 0.0) return true;  // apex inside the disc
    const double disc = b * b - cc;
    if (disc < 0.0) return false;
    return b + std::sqrt(disc) >= 0.0;
}

double ray_side_product(const Cone2D& cone, const Vec2& p) {
    const Vec2 rel = p - cone.apex;
    if (rel.x == 0.0 && rel.y == 0.0) {
        throw GeometryError("ray_side_product: point coincides with cone apex");
    }
    const Vec2 d1 = unit_from_angle(cone.heading + cone.half_angle);
    const Vec2 d2 = unit_from_angle(cone.heading - cone.half_angle);
    return cross(d1, rel) * cross(d2, rel);
}

bool in_forward_cone(const Cone2D& cone, const Vec2& p) {
    const Vec2 rel = p - cone.apex;
    if (rel.x == 0.0 && rel.y == 0.0) return true;
    if (dot(rel, unit_from_angle(cone.heading)) <= 0.0) return false;
    return ray_side_product(cone, p) <= 0.0;
}

double perp_distance(const Vec2& line_apex, double slope_angle, const Vec2& p) {
    return std::abs(cross(unit_from_angle(slope_angle), p - line_apex));
}

}  // namespace roadtrack
