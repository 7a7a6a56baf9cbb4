#include "icenav/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"

namespace icenav {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinCellOverlap = 1e-12;  // m^2; keeps grazing slivers out

struct IDir {
    int x;
    int y;
};

std::vector<IDir> heading_table(int n_headings) {
    if (n_headings == 8) {
        return {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    }
    if (n_headings == 16) {
        return {{1, 0},  {2, 1},   {1, 1},   {1, 2},  {0, 1},  {-1, 2}, {-1, 1}, {-2, 1},
                {-1, 0}, {-2, -1}, {-1, -1}, {-1, -2}, {0, -1}, {1, -2}, {1, -1}, {2, -1}};
    }
    throw ValidationError("n_headings must be 8 or 16, got " + std::to_string(n_headings));
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            if (p.x < a.x + t * (b.x - a.x)) inside = !inside;
        }
    }
    return inside;
}

Vec2 segment_point(const PrimitiveSegment& seg, double s) {
    if (seg.curvature == 0.0) {
        return {s * std::cos(seg.theta0), s * std::sin(seg.theta0)};
    }
    const double inv_k = 1.0 / seg.curvature;
    const double th = seg.theta0 + seg.curvature * s;
    return {inv_k * (std::sin(th) - std::sin(seg.theta0)), inv_k * (std::cos(seg.theta0) - std::cos(th))};
}

}  // namespace

ShipShape make_ship(Polygon body) {
    if (body.size() < 3 || !polygon_is_simple(body)) {
        throw ValidationError("ship hull must be a simple polygon");
    }
    if (signed_area(body) < 0.0) std::reverse(body.begin(), body.end());
    if (!point_in_polygon({0.0, 0.0}, body)) {
        throw ValidationError("ship hull must contain the body origin");
    }
    return ShipShape{std::move(body)};
}

ShipShape default_ship() {
    return make_ship({{-0.5, -1.2}, {0.5, -1.2}, {0.5, 0.4}, {0.0, 1.2}, {-0.5, 0.4}});
}

Polygon ship_polygon_at(const ShipShape& shape, Vec2 pos, double theta) {
    // Body frame has the bow along +y; heading theta points the bow along
    // (cos theta, sin theta).
    return translated(rotated(shape.body, theta - 0.5 * kPi), pos);
}

std::vector<PathSample> sample_primitive(const MotionPrimitive& prim, double max_step) {
    if (max_step <= 0.0) throw ValidationError("sample step must be positive");
    std::vector<PathSample> out;
    out.push_back({{0.0, 0.0}, prim.segments.empty() ? 0.0 : prim.segments.front().theta0, 0.0});
    Vec2 base{0.0, 0.0};
    double s_base = 0.0;
    for (const PrimitiveSegment& seg : prim.segments) {
        const int n = std::max(1, static_cast<int>(std::ceil(seg.length / max_step)));
        for (int i = 1; i <= n; ++i) {
            const double s = seg.length * i / n;
            out.push_back({base + segment_point(seg, s), seg.theta0 + seg.curvature * s, s_base + s});
        }
        base += segment_point(seg, seg.length);
        s_base += seg.length;
    }
    // Pin the endpoint to the exact lattice displacement.
    out.back().pos = prim.displacement;
    out.back().s = prim.arc_length;
    return out;
}

namespace {

struct TurnSolution {
    double radius = 0.0;  // signed, + left
    double tail = 0.0;    // straight tail length
    double total = 0.0;
    int dix = 0;
    int diy = 0;
};

// Arc from theta0 to theta1 with signed radius R displaces by
// R * (sin theta1 - sin theta0, cos theta0 - cos theta1); a tail of length t
// along u1 completes the move. Solving R*w + t*u1 = D picks the unique
// arc+tail pair for each candidate lattice displacement D.
std::vector<TurnSolution> solve_turn(double spacing, double theta0, double theta1, Vec2 u1, bool left,
                                     double min_radius, double max_length) {
    const Vec2 w{std::sin(theta1) - std::sin(theta0), std::cos(theta0) - std::cos(theta1)};
    const double det = cross(w, u1);
    std::vector<TurnSolution> found;
    if (std::abs(det) < 1e-12) return found;
    const double dtheta = theta1 - theta0;
    for (int diy = 1; diy <= 6; ++diy) {
        for (int dix = -6; dix <= 6; ++dix) {
            const Vec2 d{dix * spacing, diy * spacing};
            const double radius = cross(d, u1) / det;
            if (left ? radius <= 0.0 : radius >= 0.0) continue;
            if (std::abs(radius) < min_radius * (1.0 - 1e-12)) continue;
            double tail = cross(w, d) / det;
            if (tail < -1e-9) continue;
            tail = std::max(tail, 0.0);
            const double total = std::abs(radius) * std::abs(dtheta) + tail;
            if (total > max_length) continue;
            found.push_back({radius, tail, total, dix, diy});
        }
    }
    std::sort(found.begin(), found.end(), [](const TurnSolution& a, const TurnSolution& b) {
        if (a.total != b.total) return a.total < b.total;
        if (std::abs(a.dix) != std::abs(b.dix)) return std::abs(a.dix) < std::abs(b.dix);
        return a.diy < b.diy;
    });
    return found;
}

}  // namespace

ControlSet generate_control_set(double lattice_spacing, int n_headings, double turn_radius) {
    if (lattice_spacing <= 0.0) throw ValidationError("lattice_spacing must be positive");
    if (turn_radius < lattice_spacing) {
        throw ValidationError("turn_radius must be at least the lattice spacing");
    }
    const std::vector<IDir> dirs = heading_table(n_headings);

    ControlSet cs;
    cs.spacing = lattice_spacing;
    cs.n_headings = n_headings;
    cs.turn_radius = turn_radius;
    cs.by_heading.resize(static_cast<std::size_t>(n_headings));
    for (const IDir d : dirs) {
        const double len = std::hypot(static_cast<double>(d.x), static_cast<double>(d.y));
        cs.heading_dir.push_back({static_cast<double>(d.x), static_cast<double>(d.y)});
        cs.heading_unit.push_back({d.x / len, d.y / len});
        cs.heading_angle.push_back(std::atan2(static_cast<double>(d.y), static_cast<double>(d.x)));
    }

    const double max_length = 6.0 * lattice_spacing;
    const double sample_step = lattice_spacing / 16.0;

    const auto add_primitive = [&](int start_h, int end_h, int dix, int diy,
                                   std::vector<PrimitiveSegment> segments) {
        MotionPrimitive prim;
        prim.id = static_cast<int>(cs.primitives.size());
        prim.start_heading = start_h;
        prim.end_heading = end_h;
        prim.dix = dix;
        prim.diy = diy;
        prim.displacement = {dix * lattice_spacing, diy * lattice_spacing};
        prim.arc_length = 0.0;
        for (const PrimitiveSegment& s : segments) prim.arc_length += s.length;
        prim.segments = std::move(segments);
        prim.samples = sample_primitive(prim, sample_step);
        cs.by_heading[static_cast<std::size_t>(start_h)].push_back(prim.id);
        cs.primitives.push_back(std::move(prim));
    };

    for (int h = 0; h < n_headings; ++h) {
        const IDir d = dirs[static_cast<std::size_t>(h)];
        if (d.y < 0) continue;  // forward-only control set

        if (d.y > 0) {
            const double len = std::hypot(static_cast<double>(d.x), static_cast<double>(d.y)) * lattice_spacing;
            add_primitive(h, h, d.x, d.y, {{len, cs.heading_angle[static_cast<std::size_t>(h)], 0.0}});
        }

        for (const int step : {+1, -1}) {
            const int target = (h + step + n_headings) % n_headings;
            if (dirs[static_cast<std::size_t>(target)].y < 0) continue;
            const bool left = step > 0;
            const double theta0 = cs.heading_angle[static_cast<std::size_t>(h)];
            double theta1 = cs.heading_angle[static_cast<std::size_t>(target)];
            // Left turns increase theta; keep the sweep in (0, pi).
            if (left && theta1 < theta0) theta1 += 2.0 * kPi;
            if (!left && theta1 > theta0) theta1 -= 2.0 * kPi;
            const Vec2 u1 = cs.heading_unit[static_cast<std::size_t>(target)];
            const auto sols = solve_turn(lattice_spacing, theta0, theta1, u1, left, turn_radius, max_length);
            if (sols.empty()) {
                throw InfeasibleError("no lattice-exact " + std::string(left ? "left" : "right") +
                                      " turn from heading " + std::to_string(h) + " to " + std::to_string(target) +
                                      " with spacing=" + std::to_string(lattice_spacing) +
                                      " turn_radius=" + std::to_string(turn_radius));
            }
            const TurnSolution& best = sols.front();
            std::vector<PrimitiveSegment> segs;
            segs.push_back({std::abs(best.radius) * std::abs(theta1 - theta0), theta0, 1.0 / best.radius});
            if (best.tail > 0.0) segs.push_back({best.tail, theta1, 0.0});
            add_primitive(h, target, best.dix, best.diy, std::move(segs));
        }
    }

    cs.l_min = std::numeric_limits<double>::max();
    for (const MotionPrimitive& p : cs.primitives) cs.l_min = std::min(cs.l_min, p.arc_length);
    return cs;
}

PoseKey pose_key(const ControlSet& cs, const Pose& p) {
    return PoseKey{std::lround(p.x / cs.spacing), std::lround(p.y / cs.spacing), p.heading};
}

Pose apply_primitive(const ControlSet& /*cs*/, const Pose& p, const MotionPrimitive& prim) {
    if (p.heading != prim.start_heading) {
        throw ValidationError("primitive " + std::to_string(prim.id) + " starts at heading " +
                              std::to_string(prim.start_heading) + ", pose heading is " +
                              std::to_string(p.heading));
    }
    return Pose{p.x + prim.displacement.x, p.y + prim.displacement.y, prim.end_heading};
}

namespace {

// Cells overlapping the hull, optionally ignoring the grid bounds (used for
// canonical atlas sets, where indices may be negative).
CellSet footprint_cells_impl(Vec2 pos, double theta, const ShipShape& shape, const GridSpec& spec, bool clamp) {
    const Polygon hull = ship_polygon_at(shape, pos, theta);
    const Aabb bb = bounding_box(hull);
    int r0 = static_cast<int>(std::floor((bb.lo.y - spec.origin.y) / spec.cell_size));
    int r1 = static_cast<int>(std::floor((bb.hi.y - spec.origin.y) / spec.cell_size));
    int c0 = static_cast<int>(std::floor((bb.lo.x - spec.origin.x) / spec.cell_size));
    int c1 = static_cast<int>(std::floor((bb.hi.x - spec.origin.x) / spec.cell_size));
    if (clamp) {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, spec.rows - 1);
        c1 = std::min(c1, spec.cols - 1);
    }
    CellSet cells;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (rect_overlap_area(hull, spec.cell_lo(r, c), spec.cell_hi(r, c)) > kMinCellOverlap) {
                cells.push_back({r, c});
            }
        }
    }
    return cells;  // already sorted by construction
}

}  // namespace

CellSet footprint_cells_at(Vec2 pos, double theta, const ShipShape& shape, const GridSpec& spec) {
    return footprint_cells_impl(pos, theta, shape, spec, true);
}

CellSet footprint_cells(const Pose& pose, const ControlSet& cs, const ShipShape& shape, const GridSpec& spec) {
    return footprint_cells_at({pose.x, pose.y}, cs.heading_angle.at(static_cast<std::size_t>(pose.heading)), shape,
                              spec);
}

CellSet swath_cells(const Pose& pose, const MotionPrimitive& prim, const ControlSet& /*cs*/,
                    const ShipShape& shape, const GridSpec& spec) {
    if (pose.heading != prim.start_heading) {
        throw ValidationError("swath_cells: primitive start heading differs from pose heading");
    }
    const std::vector<PathSample> samples = sample_primitive(prim, 0.5 * spec.cell_size);
    CellSet cells;
    for (const PathSample& s : samples) {
        const CellSet f = footprint_cells_at({pose.x + s.pos.x, pose.y + s.pos.y}, s.theta, shape, spec);
        cells.insert(cells.end(), f.begin(), f.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

SwathAtlas::SwathAtlas(const ControlSet& cs, const ShipShape& shape, const GridSpec& spec)
    : cs_(cs), shape_(shape), spec_(spec) {
    const GridSpec unbounded{spec.cell_size, 0, 0, Vec2{0.0, 0.0}};
    fp_by_heading_.resize(cs.heading_angle.size());
    for (std::size_t h = 0; h < cs.heading_angle.size(); ++h) {
        fp_by_heading_[h] = footprint_cells_impl({0.0, 0.0}, cs.heading_angle[h], shape, unbounded, false);
    }
    swath_by_prim_.resize(cs.primitives.size());
    for (const MotionPrimitive& prim : cs.primitives) {
        CellSet cells;
        for (const PathSample& s : sample_primitive(prim, 0.5 * spec.cell_size)) {
            const CellSet f = footprint_cells_impl(s.pos, s.theta, shape, unbounded, false);
            cells.insert(cells.end(), f.begin(), f.end());
        }
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        swath_by_prim_[static_cast<std::size_t>(prim.id)] = std::move(cells);
    }
}

bool SwathAtlas::offset_of(const Pose& pose, int& dr, int& dc) const {
    const double rf = (pose.y - spec_.origin.y) / spec_.cell_size;
    const double cf = (pose.x - spec_.origin.x) / spec_.cell_size;
    dr = static_cast<int>(std::lround(rf));
    dc = static_cast<int>(std::lround(cf));
    return std::abs(dr - rf) < 1e-9 && std::abs(dc - cf) < 1e-9;
}

CellSet SwathAtlas::translate_clip(const CellSet& canonical, int dr, int dc) const {
    CellSet out;
    out.reserve(canonical.size());
    for (const GridCell& cell : canonical) {
        const int r = cell.r + dr;
        const int c = cell.c + dc;
        if (r >= 0 && r < spec_.rows && c >= 0 && c < spec_.cols) out.push_back({r, c});
    }
    return out;
}

CellSet SwathAtlas::footprint(const Pose& pose) const {
    int dr = 0, dc = 0;
    if (!offset_of(pose, dr, dc)) return footprint_cells(pose, cs_, shape_, spec_);
    return translate_clip(fp_by_heading_.at(static_cast<std::size_t>(pose.heading)), dr, dc);
}

CellSet SwathAtlas::swath(const Pose& pose, int primitive_id) const {
    int dr = 0, dc = 0;
    if (!offset_of(pose, dr, dc)) {
        return swath_cells(pose, cs_.primitive(primitive_id), cs_, shape_, spec_);
    }
    return translate_clip(swath_by_prim_.at(static_cast<std::size_t>(primitive_id)), dr, dc);
}

Path concat_path(const ControlSet& cs, const std::vector<int>& primitive_ids, const Pose& start) {
    Path path;
    path.start = start;
    path.poses.push_back(start);
    path.primitive_ids = primitive_ids;
    Pose cur = start;
    for (std::size_t i = 0; i < primitive_ids.size(); ++i) {
        const MotionPrimitive& prim = cs.primitive(primitive_ids[i]);
        if (cur.heading != prim.start_heading) {
            throw ValidationError("path joint " + std::to_string(i) + ": heading " + std::to_string(cur.heading) +
                                  " does not chain into primitive " + std::to_string(prim.id));
        }
        cur = apply_primitive(cs, cur, prim);
        path.poses.push_back(cur);
        path.length += prim.arc_length;
    }
    return path;
}

void save_control_set(const ControlSet& cs, std::ostream& out) {
    nlohmann::json j;
    j["spacing"] = cs.spacing;
    j["n_headings"] = cs.n_headings;
    j["turn_radius"] = cs.turn_radius;
    j["l_min"] = cs.l_min;
    nlohmann::json dirs = nlohmann::json::array();
    for (const Vec2 d : cs.heading_dir) dirs.push_back({static_cast<int>(d.x), static_cast<int>(d.y)});
    j["headings"] = std::move(dirs);
    nlohmann::json prims = nlohmann::json::array();
    for (const MotionPrimitive& p : cs.primitives) {
        nlohmann::json samples = nlohmann::json::array();
        for (const PathSample& s : p.samples) samples.push_back({s.pos.x, s.pos.y, s.theta});
        prims.push_back({{"id", p.id},
                         {"start_heading", p.start_heading},
                         {"end_heading", p.end_heading},
                         {"displacement", {p.displacement.x, p.displacement.y}},
                         {"arc_length", p.arc_length},
                         {"samples", std::move(samples)}});
    }
    j["primitives"] = std::move(prims);
    out << j.dump(2) << '\n';
}

}  // namespace icenav
