#include "icenav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"

namespace icenav {

namespace {

struct FloeState {
    Polygon poly;
    Aabb box;
    double mass = 0.0;
    Vec2 step_delta;  // displacement within the current sub-step
};

// Translation keeps the box exact: the extreme vertices stay extreme.
void move_floe(FloeState& f, Vec2 d) {
    for (Vec2& v : f.poly) v += d;
    f.step_delta += d;
    f.box.lo += d;
    f.box.hi += d;
}

// Removes the wall-normal component of any displacement that would carry the
// floe outside the channel: the floe slides along the wall instead.
bool clamp_to_channel(FloeState& f, const Channel& ch) {
    Vec2 fix{0.0, 0.0};
    if (f.box.lo.x < 0.0) fix.x = -f.box.lo.x;
    if (f.box.hi.x > ch.width) fix.x = ch.width - f.box.hi.x;
    if (f.box.lo.y < 0.0) fix.y = -f.box.lo.y;
    if (f.box.hi.y > ch.length) fix.y = ch.length - f.box.hi.y;
    if (fix.x == 0.0 && fix.y == 0.0) return false;
    move_floe(f, fix);
    return true;
}

}  // namespace

StepResult step_primitive(const IceField& field, const Pose& pose, const MotionPrimitive& prim,
                          const ShipShape& shape, const DynamicsParams& params) {
    if (pose.heading != prim.start_heading) {
        throw ValidationError("step_primitive: primitive does not start at the pose heading");
    }
    const Channel& ch = field.channel();
    const std::vector<PathSample> samples = sample_primitive(prim, params.sub_step);

    std::vector<FloeState> floes;
    floes.reserve(field.floes().size());
    for (const Floe& f : field.floes()) {
        floes.push_back({f.vertices, bounding_box(f.vertices), f.mass(), {0.0, 0.0}});
    }

    StepMetrics metrics;
    std::set<int> pushed;
    const double total_time = prim.arc_length / params.v_nom;

    for (std::size_t si = 1; si < samples.size(); ++si) {
        const double ds = samples[si].s - samples[si - 1].s;
        if (ds <= 0.0) continue;
        const Polygon hull =
            ship_polygon_at(shape, {pose.x + samples[si].pos.x, pose.y + samples[si].pos.y}, samples[si].theta);
        const Aabb hull_box = bounding_box(hull);

        for (FloeState& f : floes) f.step_delta = {0.0, 0.0};

        // Ship is immovable: any floe overlapping the hull is projected out.
        std::vector<std::size_t> moved;
        for (std::size_t i = 0; i < floes.size(); ++i) {
            if (!hull_box.overlaps(floes[i].box)) continue;
            const auto mtv = convex_mtv(hull, floes[i].poly);
            if (!mtv) continue;
            move_floe(floes[i], *mtv);
            metrics.wall_contact |= clamp_to_channel(floes[i], ch);
            moved.push_back(i);
        }

        // Pairwise floe-floe projection, worklist style: only pairs involving
        // a floe that moved in the previous pass are rechecked, and the
        // displacement lands entirely on the floe being pushed into, so each
        // contact propagates one way. Contacts shallower than contact_tol
        // (penetration depth) count as resolved.
        for (int iter = 0; iter < params.max_resolve_iters && !moved.empty(); ++iter) {
            std::sort(moved.begin(), moved.end());
            moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
            std::vector<std::size_t> next;
            for (const std::size_t i : moved) {
                for (std::size_t j = 0; j < floes.size(); ++j) {
                    if (j == i) continue;
                    if (!floes[i].box.overlaps(floes[j].box)) continue;
                    const auto mtv = convex_mtv(floes[i].poly, floes[j].poly);
                    if (!mtv) continue;
                    if (norm(*mtv) < params.contact_tol) continue;
                    move_floe(floes[j], *mtv);
                    metrics.wall_contact |= clamp_to_channel(floes[j], ch);
                    // A floe squeezed back into the hull is pushed out again.
                    if (hull_box.overlaps(floes[j].box)) {
                        if (const auto m2 = convex_mtv(hull, floes[j].poly)) {
                            move_floe(floes[j], *m2);
                            metrics.wall_contact |= clamp_to_channel(floes[j], ch);
                        }
                    }
                    next.push_back(j);
                }
            }
            moved = std::move(next);
        }
        if (!moved.empty()) {
            // Jam: contacts persisted through the projection budget; report
            // the remaining overlap area.
            double residual = 0.0;
            std::sort(moved.begin(), moved.end());
            moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
            for (const std::size_t i : moved) {
                for (std::size_t j = 0; j < floes.size(); ++j) {
                    if (j == i) continue;
                    if (!floes[i].box.overlaps(floes[j].box)) continue;
                    residual += 0.5 * convex_overlap_area(floes[i].poly, floes[j].poly);
                }
                if (hull_box.overlaps(floes[i].box)) {
                    residual += convex_overlap_area(hull, floes[i].poly);
                }
            }
            metrics.residual_overlap = std::max(metrics.residual_overlap, residual);
        }

        const double dt = ds / params.v_nom;
        for (std::size_t i = 0; i < floes.size(); ++i) {
            const double dist = norm(floes[i].step_delta);
            if (dist <= 0.0) continue;
            const double speed = dist / dt;
            metrics.w_approx += floes[i].mass * dist;
            metrics.impulse += floes[i].mass * speed;
            metrics.ke_loss += 0.5 * floes[i].mass * speed * speed * (dt / total_time);
            pushed.insert(static_cast<int>(i));
        }
    }

    std::vector<Floe> after;
    after.reserve(floes.size());
    for (std::size_t i = 0; i < floes.size(); ++i) {
        const Floe& src = field.floes()[i];
        after.push_back(Floe{src.id, src.density, src.thickness, std::move(floes[i].poly)});
    }
    for (const int i : pushed) metrics.pushed_floe_ids.push_back(field.floes()[static_cast<std::size_t>(i)].id);

    return StepResult{IceField(ch, std::move(after), IceField::Trusted{}), std::move(metrics)};
}

RolloutResult rollout_path(const IceField& field, const Path& path, const ControlSet& cs, const ShipShape& shape,
                           const DynamicsParams& params) {
    RolloutResult out{field, {}, {}};
    for (std::size_t i = 0; i < path.primitive_ids.size(); ++i) {
        const MotionPrimitive& prim = cs.primitive(path.primitive_ids[i]);
        StepResult step = step_primitive(out.field_after, path.poses[i], prim, shape, params);
        out.metrics.distance += prim.arc_length;
        out.metrics.ke_loss += step.metrics.ke_loss;
        out.metrics.impulse += step.metrics.impulse;
        out.metrics.w_approx += step.metrics.w_approx;
        out.metrics.residual_overlap = std::max(out.metrics.residual_overlap, step.metrics.residual_overlap);
        out.metrics.steps += 1;
        out.per_step.push_back(std::move(step.metrics));
        out.field_after = std::move(step.field_after);
    }
    return out;
}

void write_trace_jsonl(const Path& path, const RolloutResult& rollout, std::ostream& out) {
    for (std::size_t i = 0; i < rollout.per_step.size(); ++i) {
        const Pose& p = path.poses[i + 1];
        const StepMetrics& m = rollout.per_step[i];
        nlohmann::json j = {{"step", i},
                            {"primitive", path.primitive_ids[i]},
                            {"pose", {p.x, p.y, p.heading}},
                            {"ke_loss", m.ke_loss},
                            {"impulse", m.impulse},
                            {"w_approx", m.w_approx},
                            {"pushed", m.pushed_floe_ids},
                            {"residual_overlap", m.residual_overlap},
                            {"wall_contact", m.wall_contact}};
        out << j.dump() << '\n';
    }
}

}  // namespace icenav
