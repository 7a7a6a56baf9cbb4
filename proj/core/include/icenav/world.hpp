#pragma once

#include "icenav/dynamics.hpp"
#include "icenav/field.hpp"
#include "icenav/lattice.hpp"
#include "icenav/occupancy.hpp"

namespace icenav {

/// Everything that stays fixed across one experiment: channel geometry, grid
/// resolution, ship hull, control set, dynamics constants, prediction window
/// extent, and the start pose.
struct World {
    Channel channel;
    GridSpec grid;
    ControlSet control_set;
    ShipShape ship;
    DynamicsParams dynamics;
    int window_rows = 64;
    int window_cols = 48;
    Pose start;
};

/// Desk-scale defaults: 12 m x 76 m channel, 0.25 m cells, 16 headings at
/// 1 m spacing, ship starting centered at the channel foot facing +y.
World default_world();

/// True when the hull stays inside the channel along the whole primitive.
bool primitive_feasible(const Pose& pose, const MotionPrimitive& prim, const ControlSet& cs,
                        const ShipShape& shape, const GridSpec& grid);

/// Feasible primitive ids from a pose, ascending.
std::vector<int> feasible_primitives(const Pose& pose, const ControlSet& cs, const ShipShape& shape,
                                     const GridSpec& grid);

}  // namespace icenav
