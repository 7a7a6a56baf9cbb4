#pragma once

#include <iosfwd>
#include <vector>

#include "icenav/field.hpp"
#include "icenav/lattice.hpp"

namespace icenav {

struct DynamicsParams {
    double sub_step = 0.125;     // m along the primitive, = cell_size / 2
    double v_nom = 0.5;          // m/s nominal ship speed
    int max_resolve_iters = 32;  // floe-floe projection passes per sub-step
    double contact_tol = 1e-6;   // m penetration depth that counts as resolved
};

struct StepMetrics {
    double ke_loss = 0.0;        // J
    double impulse = 0.0;        // N*s
    double w_approx = 0.0;       // kg*m, sum of floe mass times displacement
    std::vector<int> pushed_floe_ids;  // sorted, unique
    double residual_overlap = 0.0;     // m^2 left unresolved after a jam
    bool wall_contact = false;
};

struct StepResult {
    IceField field_after;
    StepMetrics metrics;
};

/// Advances the ship hull through the primitive's sampled poses, pushing any
/// overlapping floe out by its minimum translation vector, then resolving
/// floe-floe overlaps by iterated pairwise projection. Floes never rotate and
/// never leave the channel. Deterministic. A jam (overlap that persists at
/// full wall contact) is reported through residual_overlap, not an error.
StepResult step_primitive(const IceField& field, const Pose& pose, const MotionPrimitive& prim,
                          const ShipShape& shape, const DynamicsParams& params = {});

struct TrialMetrics {
    double distance = 0.0;
    double ke_loss = 0.0;
    double impulse = 0.0;
    double w_approx = 0.0;
    double residual_overlap = 0.0;
    int steps = 0;
};

struct RolloutResult {
    IceField field_after;
    TrialMetrics metrics;
    std::vector<StepMetrics> per_step;
};

/// Sequential step_primitive over a chained path.
RolloutResult rollout_path(const IceField& field, const Path& path, const ControlSet& cs, const ShipShape& shape,
                           const DynamicsParams& params = {});

/// Line-delimited JSON trace: one record per step with the pose reached and
/// the step metrics.
void write_trace_jsonl(const Path& path, const RolloutResult& rollout, std::ostream& out);

}  // namespace icenav
