#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace icenav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Simple polygon as an ordered vertex ring (no repeated closing vertex).
using Polygon = std::vector<Vec2>;

struct Aabb {
    Vec2 lo;
    Vec2 hi;
    bool overlaps(const Aabb& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
};

/// Shoelace area, positive for counter-clockwise rings.
double signed_area(const Polygon& p);

Vec2 polygon_centroid(const Polygon& p);

Aabb bounding_box(const Polygon& p);

/// True if no two non-adjacent edges intersect and no edge is degenerate.
bool polygon_is_simple(const Polygon& p);

bool polygon_is_convex(const Polygon& p);

Polygon translated(const Polygon& p, Vec2 d);

/// Rotation about the origin by `angle` radians.
Polygon rotated(const Polygon& p, double angle);

/// Sutherland-Hodgman clip of `subject` against an axis-aligned rectangle.
Polygon clip_to_rect(const Polygon& subject, Vec2 lo, Vec2 hi);

/// Area of subject ∩ [lo,hi] rectangle.
double rect_overlap_area(const Polygon& subject, Vec2 lo, Vec2 hi);

/// Area of subject ∩ clip. `clip` must be convex and counter-clockwise.
double convex_overlap_area(const Polygon& subject, const Polygon& clip);

/// Minimum translation that separates convex `movable` from convex `fixed`,
/// or nullopt when they do not overlap. The returned vector moves `movable`
/// away from `fixed`.
std::optional<Vec2> convex_mtv(const Polygon& fixed, const Polygon& movable);

/// Andrew monotone chain; returns a counter-clockwise hull.
Polygon convex_hull(std::vector<Vec2> pts);

}  // namespace icenav
