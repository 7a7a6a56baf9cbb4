#include "icenav/world.hpp"

#include "icenav/errors.hpp"

namespace icenav {

World default_world() {
    World w;
    w.channel = Channel{12.0, 76.0, 70.0};
    w.grid = grid_for_channel(w.channel, 0.25);
    w.control_set = generate_control_set(1.0, 16, 2.5);
    w.ship = default_ship();
    w.dynamics = DynamicsParams{};
    w.window_rows = 64;
    w.window_cols = 48;
    int up = 0;
    for (int h = 0; h < w.control_set.n_headings; ++h) {
        if (w.control_set.heading_dir[static_cast<std::size_t>(h)].x == 0.0 &&
            w.control_set.heading_dir[static_cast<std::size_t>(h)].y == 1.0) {
            up = h;
        }
    }
    w.start = Pose{6.0, 2.0, up};
    return w;
}

bool primitive_feasible(const Pose& pose, const MotionPrimitive& prim, const ControlSet& /*cs*/,
                        const ShipShape& shape, const GridSpec& grid) {
    if (pose.heading != prim.start_heading) return false;
    const double width = grid.cols * grid.cell_size;
    const double length = grid.rows * grid.cell_size;
    for (const PathSample& s : prim.samples) {
        const Polygon hull = ship_polygon_at(shape, {pose.x + s.pos.x, pose.y + s.pos.y}, s.theta);
        const Aabb bb = bounding_box(hull);
        if (bb.lo.x < grid.origin.x - 1e-9 || bb.hi.x > grid.origin.x + width + 1e-9 ||
            bb.lo.y < grid.origin.y - 1e-9 || bb.hi.y > grid.origin.y + length + 1e-9) {
            return false;
        }
    }
    return true;
}

std::vector<int> feasible_primitives(const Pose& pose, const ControlSet& cs, const ShipShape& shape,
                                     const GridSpec& grid) {
    std::vector<int> out;
    for (const int id : cs.by_heading.at(static_cast<std::size_t>(pose.heading))) {
        if (primitive_feasible(pose, cs.primitive(id), cs, shape, grid)) out.push_back(id);
    }
    return out;
}

}  // namespace icenav
