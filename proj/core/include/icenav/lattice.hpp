#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "icenav/geometry.hpp"
#include "icenav/occupancy.hpp"

namespace icenav {

/// Discrete lattice state: position on the lattice spacing grid plus a
/// heading index into the control set's direction table.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    int heading = 0;
    bool operator==(const Pose&) const = default;
};

/// Exact integer key for CLOSED sets and memo tables.
struct PoseKey {
    long ix = 0;
    long iy = 0;
    int heading = 0;
    bool operator==(const PoseKey&) const = default;
};

struct PoseKeyHash {
    std::size_t operator()(const PoseKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        const auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(static_cast<std::uint64_t>(k.ix));
        mix(static_cast<std::uint64_t>(k.iy));
        mix(static_cast<std::uint64_t>(k.heading));
        return static_cast<std::size_t>(h);
    }
};

/// Hull polygon in the body frame, bow along +y, origin inside.
struct ShipShape {
    Polygon body;
};

/// Validates the hull ring and returns the shape. Throws ValidationError.
ShipShape make_ship(Polygon body);

/// 2.4 m x 1.0 m pentagon hull.
ShipShape default_ship();

/// Hull placed at a continuous pose; `theta` is the heading angle from +x.
Polygon ship_polygon_at(const ShipShape& shape, Vec2 pos, double theta);

/// Constant-curvature piece: theta(s) = theta0 + curvature * s from the
/// segment start.
struct PrimitiveSegment {
    double length = 0.0;
    double theta0 = 0.0;
    double curvature = 0.0;  // 1/m, 0 for straight, sign = turn direction
};

struct PathSample {
    Vec2 pos;      // relative to the primitive start pose
    double theta;  // heading angle
    double s;      // arc length from the start
};

struct MotionPrimitive {
    int id = 0;
    int start_heading = 0;
    int end_heading = 0;
    int dix = 0;  // lattice displacement, spacing units
    int diy = 0;
    Vec2 displacement;  // meters
    double arc_length = 0.0;
    std::vector<PrimitiveSegment> segments;
    std::vector<PathSample> samples;  // default sampling, endpoints included
};

/// Poses spaced at most `max_step` apart along the primitive, endpoints
/// included; the final sample sits exactly on the lattice displacement.
std::vector<PathSample> sample_primitive(const MotionPrimitive& prim, double max_step);

class ControlSet {
public:
    double spacing = 1.0;
    int n_headings = 16;
    double turn_radius = 2.5;
    std::vector<Vec2> heading_dir;      // integer direction per heading
    std::vector<Vec2> heading_unit;     // normalized
    std::vector<double> heading_angle;  // atan2 of the direction
    std::vector<MotionPrimitive> primitives;
    std::vector<std::vector<int>> by_heading;  // primitive ids per start heading
    double l_min = 0.0;

    const MotionPrimitive& primitive(int id) const { return primitives.at(static_cast<std::size_t>(id)); }
};

/// Straight plus left/right arc-and-tail turn primitives per forward-facing
/// heading, all ending exactly on lattice states and all moving +y.
/// Supported heading counts: 8 and 16. Throws InfeasibleError when no
/// lattice-exact turn exists for the given spacing/turn_radius.
ControlSet generate_control_set(double lattice_spacing, int n_headings, double turn_radius);

PoseKey pose_key(const ControlSet& cs, const Pose& p);

/// Throws ValidationError if the primitive's start heading differs from the
/// pose heading.
Pose apply_primitive(const ControlSet& cs, const Pose& p, const MotionPrimitive& prim);

struct GridCell {
    int r = 0;
    int c = 0;
    auto operator<=>(const GridCell&) const = default;
};
using CellSet = std::vector<GridCell>;  // sorted, unique

/// Cells with nonzero overlap against the hull at a continuous pose,
/// restricted to the grid.
CellSet footprint_cells_at(Vec2 pos, double theta, const ShipShape& shape, const GridSpec& spec);

CellSet footprint_cells(const Pose& pose, const ControlSet& cs, const ShipShape& shape, const GridSpec& spec);

/// Union of footprints along the primitive, sampled at cell_size/2.
CellSet swath_cells(const Pose& pose, const MotionPrimitive& prim, const ControlSet& cs, const ShipShape& shape,
                    const GridSpec& spec);

/// Precomputed footprint and swath cell sets, translated to lattice poses.
/// Exact whenever the lattice spacing is a multiple of the cell size and
/// poses sit on the spacing grid (cells translate rigidly then); other poses
/// fall back to direct clipping.
class SwathAtlas {
public:
    SwathAtlas(const ControlSet& cs, const ShipShape& shape, const GridSpec& spec);

    CellSet footprint(const Pose& pose) const;
    CellSet swath(const Pose& pose, int primitive_id) const;

private:
    bool offset_of(const Pose& pose, int& dr, int& dc) const;
    CellSet translate_clip(const CellSet& canonical, int dr, int dc) const;

    const ControlSet& cs_;
    const ShipShape& shape_;
    GridSpec spec_;
    std::vector<CellSet> fp_by_heading_;    // at the canonical origin pose
    std::vector<CellSet> swath_by_prim_;
};

struct Path {
    Pose start;
    std::vector<int> primitive_ids;
    std::vector<Pose> poses;  // start plus each joint, size = primitives + 1
    double length = 0.0;
};

/// Chains primitives from `start`; throws ValidationError naming the first
/// broken joint.
Path concat_path(const ControlSet& cs, const std::vector<int>& primitive_ids, const Pose& start);

/// JSON export: headings, primitives with displacement, arc length, and
/// sampled poses.
void save_control_set(const ControlSet& cs, std::ostream& out);

}  // namespace icenav
