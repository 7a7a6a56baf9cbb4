#pragma once

#include <iosfwd>

#include "icenav/predictor.hpp"

namespace icenav {

struct EdgeBreakdown {
    int primitive_id = -1;
    Pose from;
    double length = 0.0;
    double collision = 0.0;  // occupancy diff for this edge
};

struct PathResult {
    bool found = false;
    Path path;
    double total_cost = 0.0;      // u = d + alpha * C
    double distance = 0.0;        // d
    double collision_cost = 0.0;  // C
    double alpha = 0.0;
    std::vector<EdgeBreakdown> edges;
    long nodes_expanded = 0;
    long predictions_made = 0;
};

/// Edge cost d(pi) + alpha * MSE(before, after); bounded by
/// [d(pi), d(pi) + alpha] for ratio grids.
double edge_cost(const OccupancyGrid& before_local, const OccupancyGrid& after_local,
                 const MotionPrimitive& prim, double alpha);

struct PlannerOptions {
    bool memoize = true;  // per-node global-occupancy cache; off = recompute along the parent chain
    long max_expansions = 2000000;
};

/// A* over the state lattice with one-step occupancy prediction. Expanding a
/// node crops its cached global occupancy, predicts all feasible primitives
/// as one batch, costs each edge by length plus scaled occupancy MSE, and
/// caches the stitched global map on the reached node (updated whenever a
/// cheaper parent is found). CLOSED is keyed on the lattice pose; the
/// heuristic is the remaining distance to the goal line, max(0, y_goal - y).
/// Throws NoPathError when OPEN empties.
PathResult plan_predictive(const Pose& start, const OccupancyGrid& global_occ, double y_goal,
                           Predictor& predictor, const ControlSet& cs, const ShipShape& shape, double alpha,
                           int window_rows, int window_cols, const PlannerOptions& opts = {});

/// Same search with obstacles held static: no predictions, edge cost is
/// d(pi) + alpha * (mean of the unchanged global occupancy under the swath).
PathResult plan_static_lattice(const Pose& start, const OccupancyGrid& global_occ, double y_goal,
                               const ControlSet& cs, const ShipShape& shape, double alpha);

/// Straight primitives from the start heading until the goal line, costed
/// post-hoc by ground-truth rollout.
PathResult plan_straight(const Pose& start, double y_goal, const IceField& field, const ControlSet& cs,
                         const ShipShape& shape, const GridSpec& grid, double alpha, int window_rows,
                         int window_cols, const DynamicsParams& params = {});

/// Ground-truth cost of a concrete path: rolls the dynamics along it and
/// accumulates the same window-cropped MSE edge costs the planners use.
PathResult evaluate_path(const Path& path, const IceField& field, const ControlSet& cs, const ShipShape& shape,
                         const GridSpec& grid, double alpha, int window_rows, int window_cols,
                         const DynamicsParams& params = {});

/// Exhaustive depth-first enumeration of every primitive sequence reaching
/// the goal line, each branch carrying its own path-dependent field (no
/// sharing), with an admissible branch-and-bound cut. Returns the global
/// minimum of u. Throws InstanceTooLargeError past max_nodes visits.
PathResult optimal_oracle(const Pose& start, const IceField& field, double y_goal, const ControlSet& cs,
                          const ShipShape& shape, const GridSpec& grid, double alpha, long max_nodes,
                          int window_rows, int window_cols, const DynamicsParams& params = {});

/// JSON document with primitive ids, poses, and the per-edge cost breakdown.
void save_path_result(const PathResult& result, std::ostream& out);

}  // namespace icenav
