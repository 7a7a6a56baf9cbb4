#include "icenav/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <queue>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"

namespace icenav {

double edge_cost(const OccupancyGrid& before_local, const OccupancyGrid& after_local,
                 const MotionPrimitive& prim, double alpha) {
    if (alpha < 0.0) throw ValidationError("edge_cost: alpha must be non-negative");
    return prim.arc_length + alpha * diff_mse(before_local, after_local);
}

namespace {

double heuristic(double y, double y_goal) { return std::max(0.0, y_goal - y); }

struct Node {
    Pose pose;
    double g = 0.0;
    int parent = -1;
    int via_prim = -1;
    double via_length = 0.0;
    double via_diff = 0.0;
    OccupancyGrid patch;  // predicted local occupancy, valid with patch_window
    Window patch_window;
    OccupancyGrid materialized;  // stitched global at this node, set when expanded
    bool has_materialized = false;
    bool closed = false;
};

struct QueueEntry {
    double f = 0.0;
    double g = 0.0;
    long seq = 0;
    int node = -1;
};

// Deterministic ordering: lowest f, then highest g (deeper first), then
// insertion order.
struct QueueWorse {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.seq > b.seq;
    }
};

struct Search {
    std::vector<Node> nodes;
    std::unordered_map<PoseKey, int, PoseKeyHash> index;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueWorse> open;
    long seq = 0;

    int intern(const ControlSet& cs, const Pose& p) {
        const PoseKey key = pose_key(cs, p);
        const auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(Node{});
        nodes.back().pose = p;
        index.emplace(key, id);
        return id;
    }
};

PathResult reconstruct(const ControlSet& cs, const Search& s, int goal, double alpha) {
    std::vector<int> prims;
    std::vector<EdgeBreakdown> edges;
    for (int i = goal; s.nodes[static_cast<std::size_t>(i)].parent >= 0;
         i = s.nodes[static_cast<std::size_t>(i)].parent) {
        const Node& n = s.nodes[static_cast<std::size_t>(i)];
        prims.push_back(n.via_prim);
        edges.push_back({n.via_prim, s.nodes[static_cast<std::size_t>(n.parent)].pose, n.via_length, n.via_diff});
    }
    std::reverse(prims.begin(), prims.end());
    std::reverse(edges.begin(), edges.end());

    PathResult out;
    out.found = true;
    out.alpha = alpha;
    int root = goal;
    while (s.nodes[static_cast<std::size_t>(root)].parent >= 0) {
        root = s.nodes[static_cast<std::size_t>(root)].parent;
    }
    out.path = concat_path(cs, prims, s.nodes[static_cast<std::size_t>(root)].pose);
    out.total_cost = s.nodes[static_cast<std::size_t>(goal)].g;
    out.edges = std::move(edges);
    for (const EdgeBreakdown& e : out.edges) {
        out.distance += e.length;
        out.collision_cost += e.collision;
    }
    return out;
}

// Global occupancy at an expanded node. With the memo this is one stitch on
// the parent's cached grid; without it the whole parent chain is replayed
// through the predictor, issuing one prediction per chain edge.
const OccupancyGrid& materialize(Search& s, int id, const OccupancyGrid& root_occ, bool memoize,
                                 Predictor& predictor, const ControlSet& cs, const SwathAtlas& atlas,
                                 int wr, int wc, long& predictions) {
    Node& n = s.nodes[static_cast<std::size_t>(id)];
    if (n.has_materialized) return n.materialized;
    if (n.parent < 0) {
        n.materialized = root_occ;
    } else if (memoize) {
        const Node& p = s.nodes[static_cast<std::size_t>(n.parent)];
        n.materialized = stitch(p.materialized, n.patch, n.patch_window);
    } else {
        std::vector<int> chain;
        for (int i = id; i >= 0; i = s.nodes[static_cast<std::size_t>(i)].parent) chain.push_back(i);
        std::reverse(chain.begin(), chain.end());
        OccupancyGrid cur = root_occ;
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            const Node& from = s.nodes[static_cast<std::size_t>(chain[k])];
            const Node& to = s.nodes[static_cast<std::size_t>(chain[k + 1])];
            PredictionInput input =
                assemble_input(cur, from.pose, cs.primitive(to.via_prim), atlas, wr, wc);
            if (from.parent >= 0) {
                input.provenance.incoming =
                    EdgeRef{s.nodes[static_cast<std::size_t>(from.parent)].pose, from.via_prim};
            }
            OccupancyGrid predicted = predictor.predict_one(input);
            ++predictions;
            cur = stitch(cur, predicted, input.window);
        }
        n.materialized = std::move(cur);
    }
    n.has_materialized = true;
    return n.materialized;
}

}  // namespace

PathResult plan_predictive(const Pose& start, const OccupancyGrid& global_occ, double y_goal,
                           Predictor& predictor, const ControlSet& cs, const ShipShape& shape, double alpha,
                           int window_rows, int window_cols, const PlannerOptions& opts) {
    if (alpha < 0.0) throw ValidationError("plan_predictive: alpha must be non-negative");
    const GridSpec& grid = global_occ.spec();
    if (y_goal > grid.origin.y + grid.rows * grid.cell_size) {
        throw ValidationError("plan_predictive: goal line beyond the grid");
    }

    Search s;
    PathResult stats;
    stats.alpha = alpha;
    const SwathAtlas atlas(cs, shape, grid);
    const int root = s.intern(cs, start);
    s.nodes[static_cast<std::size_t>(root)].g = 0.0;
    s.open.push({heuristic(start.y, y_goal), 0.0, s.seq++, root});

    while (!s.open.empty()) {
        const QueueEntry e = s.open.top();
        s.open.pop();
        Node& n = s.nodes[static_cast<std::size_t>(e.node)];
        if (n.closed || e.g != n.g) continue;  // stale lazy-deletion entry

        if (n.pose.y >= y_goal) {
            PathResult out = reconstruct(cs, s, e.node, alpha);
            out.nodes_expanded = stats.nodes_expanded;
            out.predictions_made = stats.predictions_made;
            return out;
        }
        n.closed = true;
        if (++stats.nodes_expanded > opts.max_expansions) {
            throw InstanceTooLargeError("plan_predictive: expansion budget exceeded");
        }
        const Pose n_pose = n.pose;  // s.intern below may reallocate the node store
        const double n_g = n.g;
        const int n_parent = n.parent;
        const int n_via = n.via_prim;

        const OccupancyGrid& occ = materialize(s, e.node, global_occ, opts.memoize, predictor, cs, atlas,
                                               window_rows, window_cols, stats.predictions_made);

        // One batched prediction covering every feasible primitive of n.
        std::vector<PredictionInput> batch;
        std::vector<int> batch_prim;
        for (const int pid : cs.by_heading.at(static_cast<std::size_t>(n_pose.heading))) {
            const MotionPrimitive& prim = cs.primitive(pid);
            if (!primitive_feasible(n_pose, prim, cs, shape, grid)) continue;
            const Pose next = apply_primitive(cs, n_pose, prim);
            const auto it = s.index.find(pose_key(cs, next));
            if (it != s.index.end() && s.nodes[static_cast<std::size_t>(it->second)].closed) continue;
            PredictionInput input = assemble_input(occ, n_pose, prim, atlas, window_rows, window_cols);
            if (n_parent >= 0) {
                input.provenance.incoming =
                    EdgeRef{s.nodes[static_cast<std::size_t>(n_parent)].pose, n_via};
            }
            batch.push_back(std::move(input));
            batch_prim.push_back(pid);
        }
        if (batch.empty()) continue;
        std::vector<OccupancyGrid> predicted = predictor.predict(batch);
        stats.predictions_made += static_cast<long>(batch.size());

        for (std::size_t i = 0; i < batch.size(); ++i) {
            const MotionPrimitive& prim = cs.primitive(batch_prim[i]);
            const double diff = diff_mse(batch[i].local_occupancy, predicted[i]);
            const double ec = prim.arc_length + alpha * diff;
            assert(ec >= prim.arc_length && ec <= prim.arc_length + alpha + 1e-12);
            const double cost = n_g + ec;
            const Pose next = apply_primitive(cs, n_pose, prim);
            const int m = s.intern(cs, next);
            Node& nm = s.nodes[static_cast<std::size_t>(m)];
            const bool fresh = nm.via_prim < 0 && nm.parent < 0 && m != root;
            if (fresh || cost < nm.g) {
                nm.g = cost;
                nm.parent = e.node;
                nm.via_prim = prim.id;
                nm.via_length = prim.arc_length;
                nm.via_diff = diff;
                nm.patch = predicted[i];
                nm.patch_window = batch[i].window;
                s.open.push({cost + heuristic(next.y, y_goal), cost, s.seq++, m});
            }
        }
    }
    throw NoPathError("plan_predictive: frontier exhausted before the goal line");
}

PathResult plan_static_lattice(const Pose& start, const OccupancyGrid& global_occ, double y_goal,
                               const ControlSet& cs, const ShipShape& shape, double alpha) {
    if (alpha < 0.0) throw ValidationError("plan_static_lattice: alpha must be non-negative");
    const GridSpec& grid = global_occ.spec();

    Search s;
    long expanded = 0;
    const SwathAtlas atlas(cs, shape, grid);
    const int root = s.intern(cs, start);
    s.nodes[static_cast<std::size_t>(root)].g = 0.0;
    s.open.push({heuristic(start.y, y_goal), 0.0, s.seq++, root});

    while (!s.open.empty()) {
        const QueueEntry e = s.open.top();
        s.open.pop();
        Node& n = s.nodes[static_cast<std::size_t>(e.node)];
        if (n.closed || e.g != n.g) continue;
        if (n.pose.y >= y_goal) {
            PathResult out = reconstruct(cs, s, e.node, alpha);
            out.nodes_expanded = expanded;
            return out;
        }
        n.closed = true;
        ++expanded;
        const Pose n_pose = n.pose;  // s.intern below may reallocate the node store
        const double n_g = n.g;

        for (const int pid : cs.by_heading.at(static_cast<std::size_t>(n_pose.heading))) {
            const MotionPrimitive& prim = cs.primitive(pid);
            if (!primitive_feasible(n_pose, prim, cs, shape, grid)) continue;
            const Pose next = apply_primitive(cs, n_pose, prim);
            const auto it = s.index.find(pose_key(cs, next));
            if (it != s.index.end() && s.nodes[static_cast<std::size_t>(it->second)].closed) continue;

            const CellSet swath = atlas.swath(n_pose, prim.id);
            double occ_mean = 0.0;
            for (const GridCell& cell : swath) occ_mean += global_occ.at(cell.r, cell.c);
            if (!swath.empty()) occ_mean /= static_cast<double>(swath.size());
            const double ec = prim.arc_length + alpha * occ_mean;
            const double cost = n_g + ec;
            const int m = s.intern(cs, next);
            Node& nm = s.nodes[static_cast<std::size_t>(m)];
            const bool fresh = nm.via_prim < 0 && nm.parent < 0 && m != root;
            if (fresh || cost < nm.g) {
                nm.g = cost;
                nm.parent = e.node;
                nm.via_prim = prim.id;
                nm.via_length = prim.arc_length;
                nm.via_diff = occ_mean;
                s.open.push({cost + heuristic(next.y, y_goal), cost, s.seq++, m});
            }
        }
    }
    throw NoPathError("plan_static_lattice: frontier exhausted before the goal line");
}

PathResult evaluate_path(const Path& path, const IceField& field, const ControlSet& cs, const ShipShape& shape,
                         const GridSpec& grid, double alpha, int window_rows, int window_cols,
                         const DynamicsParams& params) {
    PathResult out;
    out.found = true;
    out.alpha = alpha;
    out.path = path;
    IceField cur = field;
    for (std::size_t i = 0; i < path.primitive_ids.size(); ++i) {
        const MotionPrimitive& prim = cs.primitive(path.primitive_ids[i]);
        const Pose& pose = path.poses[i];
        const Window w = window_at(grid, Vec2{pose.x, pose.y}, window_rows, window_cols);
        const OccupancyGrid before = rasterize_window(cur, grid, w);
        StepResult step = step_primitive(cur, pose, prim, shape, params);
        const OccupancyGrid after = rasterize_window(step.field_after, grid, w);
        const double diff = diff_mse(before, after);
        out.edges.push_back({prim.id, pose, prim.arc_length, diff});
        out.total_cost += prim.arc_length + alpha * diff;
        out.distance += prim.arc_length;
        out.collision_cost += diff;
        cur = std::move(step.field_after);
    }
    return out;
}

PathResult plan_straight(const Pose& start, double y_goal, const IceField& field, const ControlSet& cs,
                         const ShipShape& shape, const GridSpec& grid, double alpha, int window_rows,
                         int window_cols, const DynamicsParams& params) {
    int straight = -1;
    for (const int pid : cs.by_heading.at(static_cast<std::size_t>(start.heading))) {
        const MotionPrimitive& p = cs.primitive(pid);
        if (p.start_heading == p.end_heading && p.segments.size() == 1 && p.segments[0].curvature == 0.0) {
            straight = pid;
        }
    }
    if (straight < 0) {
        throw NoPathError("plan_straight: start heading has no straight primitive");
    }
    std::vector<int> prims;
    Pose cur = start;
    while (cur.y < y_goal) {
        const MotionPrimitive& prim = cs.primitive(straight);
        if (!primitive_feasible(cur, prim, cs, shape, grid)) {
            throw NoPathError("plan_straight: straight run leaves the channel before the goal line");
        }
        prims.push_back(straight);
        cur = apply_primitive(cs, cur, prim);
    }
    const Path path = concat_path(cs, prims, start);
    return evaluate_path(path, field, cs, shape, grid, alpha, window_rows, window_cols, params);
}

namespace {

struct OracleContext {
    OracleContext(const ControlSet& cs_in, const ShipShape& shape_in, const GridSpec& grid_in,
                  const DynamicsParams& params_in, double alpha_in, double y_goal_in, long max_nodes_in,
                  int wr_in, int wc_in)
        : cs(cs_in), shape(shape_in), grid(grid_in), params(params_in), alpha(alpha_in), y_goal(y_goal_in),
          max_nodes(max_nodes_in), wr(wr_in), wc(wc_in) {}

    const ControlSet& cs;
    const ShipShape& shape;
    const GridSpec& grid;
    const DynamicsParams& params;
    double alpha;
    double y_goal;
    long max_nodes;
    int wr, wc;
    long visited = 0;
    double best_u = std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<int> best_prims;
    double best_d = 0.0, best_c = 0.0;
    std::vector<EdgeBreakdown> best_edges;
    std::vector<int> prims;
    std::vector<EdgeBreakdown> edges;
};

void oracle_dfs(OracleContext& ctx, const Pose& pose, const IceField& field, double u, double d, double c) {
    if (++ctx.visited > ctx.max_nodes) {
        throw InstanceTooLargeError("optimal_oracle: enumeration exceeded " + std::to_string(ctx.max_nodes) +
                                    " nodes");
    }
    if (pose.y >= ctx.y_goal) {
        if (u < ctx.best_u) {
            ctx.best_u = u;
            ctx.best_d = d;
            ctx.best_c = c;
            ctx.best_prims = ctx.prims;
            ctx.best_edges = ctx.edges;
            ctx.found = true;
        }
        return;
    }
    if (u + (ctx.y_goal - pose.y) >= ctx.best_u) return;  // every edge costs at least its y-progress

    const Window w = window_at(ctx.grid, Vec2{pose.x, pose.y}, ctx.wr, ctx.wc);
    const OccupancyGrid before = rasterize_window(field, ctx.grid, w);
    for (const int pid : ctx.cs.by_heading.at(static_cast<std::size_t>(pose.heading))) {
        const MotionPrimitive& prim = ctx.cs.primitive(pid);
        if (!primitive_feasible(pose, prim, ctx.cs, ctx.shape, ctx.grid)) continue;
        StepResult step = step_primitive(field, pose, prim, ctx.shape, ctx.params);
        const OccupancyGrid after = rasterize_window(step.field_after, ctx.grid, w);
        const double diff = diff_mse(before, after);
        ctx.prims.push_back(pid);
        ctx.edges.push_back({pid, pose, prim.arc_length, diff});
        oracle_dfs(ctx, apply_primitive(ctx.cs, pose, prim), step.field_after,
                   u + prim.arc_length + ctx.alpha * diff, d + prim.arc_length, c + diff);
        ctx.prims.pop_back();
        ctx.edges.pop_back();
    }
}

}  // namespace

PathResult optimal_oracle(const Pose& start, const IceField& field, double y_goal, const ControlSet& cs,
                          const ShipShape& shape, const GridSpec& grid, double alpha, long max_nodes,
                          int window_rows, int window_cols, const DynamicsParams& params) {
    OracleContext ctx(cs, shape, grid, params, alpha, y_goal, max_nodes, window_rows, window_cols);
    oracle_dfs(ctx, start, field, 0.0, 0.0, 0.0);
    if (!ctx.found) throw NoPathError("optimal_oracle: no primitive sequence reaches the goal line");
    PathResult out;
    out.found = true;
    out.alpha = alpha;
    out.path = concat_path(cs, ctx.best_prims, start);
    out.total_cost = ctx.best_u;
    out.distance = ctx.best_d;
    out.collision_cost = ctx.best_c;
    out.edges = std::move(ctx.best_edges);
    out.nodes_expanded = ctx.visited;
    return out;
}

void save_path_result(const PathResult& result, std::ostream& out) {
    nlohmann::json j;
    j["found"] = result.found;
    j["total_cost"] = result.total_cost;
    j["distance"] = result.distance;
    j["collision_cost"] = result.collision_cost;
    j["alpha"] = result.alpha;
    j["nodes_expanded"] = result.nodes_expanded;
    j["predictions_made"] = result.predictions_made;
    j["primitive_ids"] = result.path.primitive_ids;
    nlohmann::json poses = nlohmann::json::array();
    for (const Pose& p : result.path.poses) poses.push_back({p.x, p.y, p.heading});
    j["poses"] = std::move(poses);
    nlohmann::json edges = nlohmann::json::array();
    for (const EdgeBreakdown& e : result.edges) {
        edges.push_back({{"primitive", e.primitive_id},
                         {"from", {e.from.x, e.from.y, e.from.heading}},
                         {"length", e.length},
                         {"collision", e.collision}});
    }
    j["edges"] = std::move(edges);
    out << j.dump(2) << '\n';
}

}  // namespace icenav
