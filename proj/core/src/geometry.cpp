#include "icenav/geometry.hpp"

#include <algorithm>
#include <limits>

namespace icenav {

double signed_area(const Polygon& p) {
    double twice = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        twice += cross(p[j], p[i]);
    }
    return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& p) {
    const std::size_t n = p.size();
    double a2 = 0.0;
    Vec2 c{0.0, 0.0};
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double w = cross(p[j], p[i]);
        a2 += w;
        c.x += (p[j].x + p[i].x) * w;
        c.y += (p[j].y + p[i].y) * w;
    }
    if (a2 == 0.0) {
        return p.empty() ? Vec2{} : p.front();
    }
    return {c.x / (3.0 * a2), c.y / (3.0 * a2)};
}

Aabb bounding_box(const Polygon& p) {
    Aabb b{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
           {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
    for (const Vec2 v : p) {
        b.lo.x = std::min(b.lo.x, v.x);
        b.lo.y = std::min(b.lo.y, v.y);
        b.hi.x = std::max(b.hi.x, v.x);
        b.hi.y = std::max(b.hi.y, v.y);
    }
    return b;
}

namespace {

// Proper or touching intersection of closed segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = cross(q - p, r - p);
        if (v > 0.0) return 1;
        if (v < 0.0) return -1;
        return 0;
    };
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;

    const auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    if (o1 == 0 && on_segment(a, c, b)) return true;
    if (o2 == 0 && on_segment(a, d, b)) return true;
    if (o3 == 0 && on_segment(c, a, d)) return true;
    if (o4 == 0 && on_segment(c, b, d)) return true;
    return false;
}

}  // namespace

bool polygon_is_simple(const Polygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = p[i];
        const Vec2 b = p[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges sharing a vertex with edge i.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(a, b, p[j], p[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool polygon_is_convex(const Polygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cross(p[(i + 1) % n] - p[i], p[(i + 2) % n] - p[(i + 1) % n]);
        if (c != 0.0) {
            const int s = c > 0.0 ? 1 : -1;
            if (sign == 0) {
                sign = s;
            } else if (s != sign) {
                return false;
            }
        }
    }
    return true;
}

Polygon translated(const Polygon& p, Vec2 d) {
    Polygon out;
    out.reserve(p.size());
    for (const Vec2 v : p) out.push_back(v + d);
    return out;
}

Polygon rotated(const Polygon& p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Polygon out;
    out.reserve(p.size());
    for (const Vec2 v : p) out.push_back({c * v.x - s * v.y, s * v.x + c * v.y});
    return out;
}

namespace {

// One Sutherland-Hodgman pass against the half-plane keep(v) >= 0.
template <typename Inside, typename Intersect>
Polygon clip_halfplane(const Polygon& in, Inside inside, Intersect intersect) {
    Polygon out;
    const std::size_t n = in.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 cur = in[i];
        const Vec2 prev = in[j];
        const bool ci = inside(cur);
        const bool pi = inside(prev);
        if (ci) {
            if (!pi) out.push_back(intersect(prev, cur));
            out.push_back(cur);
        } else if (pi) {
            out.push_back(intersect(prev, cur));
        }
    }
    return out;
}

}  // namespace

Polygon clip_to_rect(const Polygon& subject, Vec2 lo, Vec2 hi) {
    Polygon p = clip_halfplane(
        subject, [&](Vec2 v) { return v.x >= lo.x; },
        [&](Vec2 a, Vec2 b) {
            const double t = (lo.x - a.x) / (b.x - a.x);
            return Vec2{lo.x, a.y + t * (b.y - a.y)};
        });
    p = clip_halfplane(
        p, [&](Vec2 v) { return v.x <= hi.x; },
        [&](Vec2 a, Vec2 b) {
            const double t = (hi.x - a.x) / (b.x - a.x);
            return Vec2{hi.x, a.y + t * (b.y - a.y)};
        });
    p = clip_halfplane(
        p, [&](Vec2 v) { return v.y >= lo.y; },
        [&](Vec2 a, Vec2 b) {
            const double t = (lo.y - a.y) / (b.y - a.y);
            return Vec2{a.x + t * (b.x - a.x), lo.y};
        });
    p = clip_halfplane(
        p, [&](Vec2 v) { return v.y <= hi.y; },
        [&](Vec2 a, Vec2 b) {
            const double t = (hi.y - a.y) / (b.y - a.y);
            return Vec2{a.x + t * (b.x - a.x), hi.y};
        });
    return p;
}

double rect_overlap_area(const Polygon& subject, Vec2 lo, Vec2 hi) {
    const Polygon clipped = clip_to_rect(subject, lo, hi);
    if (clipped.size() < 3) return 0.0;
    return std::abs(signed_area(clipped));
}

double convex_overlap_area(const Polygon& subject, const Polygon& clip) {
    Polygon p = subject;
    const std::size_t n = clip.size();
    for (std::size_t i = 0, j = n - 1; i < n && !p.empty(); j = i++) {
        const Vec2 a = clip[j];
        const Vec2 b = clip[i];
        const Vec2 e = b - a;
        p = clip_halfplane(
            p, [&](Vec2 v) { return cross(e, v - a) >= 0.0; },
            [&](Vec2 u, Vec2 v) {
                const double denom = cross(e, v - u);
                const double t = denom == 0.0 ? 0.0 : cross(e, a - u) / denom;
                return u + (v - u) * t;
            });
    }
    if (p.size() < 3) return 0.0;
    return std::abs(signed_area(p));
}

std::optional<Vec2> convex_mtv(const Polygon& fixed, const Polygon& movable) {
    // Normalized penetration compared as pen^2/len^2 so each axis needs no
    // square root until the winner is known.
    double best_ratio2 = std::numeric_limits<double>::max();
    Vec2 best_axis{};
    double best_pen_raw = 0.0;
    double best_len2 = 1.0;

    // Per axis, the translation that clears the overlap is the smaller of
    // pushing `movable` to either side; this stays correct when one polygon
    // contains the other.
    const auto test_axes = [&](const Polygon& poly) -> bool {
        const std::size_t n = poly.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2 e = poly[i] - poly[j];
            const double len2 = e.x * e.x + e.y * e.y;
            if (len2 == 0.0) continue;
            const Vec2 axis{-e.y, e.x};
            double min_f = std::numeric_limits<double>::max(), max_f = std::numeric_limits<double>::lowest();
            for (const Vec2 v : fixed) {
                const double d = dot(axis, v);
                min_f = std::min(min_f, d);
                max_f = std::max(max_f, d);
            }
            double min_m = std::numeric_limits<double>::max(), max_m = std::numeric_limits<double>::lowest();
            for (const Vec2 v : movable) {
                const double d = dot(axis, v);
                min_m = std::min(min_m, d);
                max_m = std::max(max_m, d);
            }
            const double push_pos = max_f - min_m;  // move movable along +axis
            const double push_neg = max_m - min_f;  // move movable along -axis
            const double pen = std::min(push_pos, push_neg);
            if (pen <= 0.0) return false;  // separating axis
            const double ratio2 = pen * pen / len2;
            if (ratio2 < best_ratio2) {
                best_ratio2 = ratio2;
                best_axis = push_pos <= push_neg ? axis : axis * -1.0;
                best_pen_raw = pen;
                best_len2 = len2;
            }
        }
        return true;
    };

    if (!test_axes(fixed)) return std::nullopt;
    if (!test_axes(movable)) return std::nullopt;
    // axis is unnormalized; projections were scaled by |axis| too.
    return best_axis * (best_pen_raw / best_len2);
}

Polygon convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace icenav
