#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "icenav/config.hpp"
#include "icenav/planner.hpp"

namespace icenav {

enum class TrialStatus { ok = 0, no_path = 1, step_cap = 2 };

struct TrialRecord {
    std::string planner;
    std::uint64_t seed = 0;
    double concentration = 0.0;
    double alpha = 0.0;
    TrialMetrics metrics;          // executed-path physical metrics
    double collision_cost = 0.0;   // C over the executed path (window MSE)
    double total_cost = 0.0;       // u = d + alpha * C
    long predictions = 0;
    long nodes_expanded = 0;
    TrialStatus status = TrialStatus::ok;
    double wall_ms = 0.0;          // measured, never written to CSV outputs
};

/// One navigation trial: plan (once, or after every executed primitive when
/// replanning), execute through the ground-truth dynamics, accumulate
/// metrics. A planner failure is recorded in the status, not thrown.
TrialRecord run_trial(const World& world, const std::string& planner_id, const IceField& scenario,
                      std::uint64_t seed, double alpha, bool replan, int max_steps);

/// One executed random-policy primitive: the three occupancy diffs over the
/// prediction window plus the physical step metrics.
struct CollisionEntry {
    double mse = 0.0;
    double neg_ssim = 0.0;
    double emd = 0.0;
    double ke_loss = 0.0;
    double impulse = 0.0;
    double w_approx = 0.0;
};

struct CorrelationReport {
    long entries = 0;
    // rows: mse, neg_ssim, emd; columns: ke_loss, impulse, w_approx
    std::array<std::array<double, 3>, 3> pearson{};
    std::array<std::array<bool, 3>, 3> defined{};
    std::string to_csv() const;  // includes the tank-scale reference rows
};

/// Random-policy navigation across the configured concentrations, one entry
/// per executed primitive, then the Pearson matrix between occupancy diffs
/// and collision metrics.
CorrelationReport correlation_study(const ExperimentConfig& config);

struct BoundInstance {
    std::uint64_t seed = 0;
    double concentration = 0.0;
    double u_alg = 0.0;
    double u_opt = 0.0;
    double ratio = 0.0;
    bool skipped = false;  // oracle budget exceeded
};

struct BoundReport {
    double alpha = 0.0;
    double l_min = 0.0;
    double bound = 0.0;  // 1 + alpha / l_min
    std::vector<BoundInstance> instances;
    int skipped = 0;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    std::string to_csv() const;
};

/// Plans each seeded small instance once with the rollout predictor, costs
/// the optimum by exhaustive enumeration, and reports the ratio distribution
/// against 1 + alpha / l_min.
BoundReport bound_check(const ExperimentConfig& config);

struct CompareReport {
    std::vector<TrialRecord> records;  // deterministic order
    std::string trials_csv() const;
    std::string summary_csv() const;  // median + IQR per planner/alpha/concentration
};

/// Full campaign over planners x alphas x concentrations x seeds, distributed
/// over a worker pool; record order is independent of scheduling.
CompareReport compare_planners(const ExperimentConfig& config);

/// Writes trials/summary CSVs and per-concentration box-plot SVGs under
/// config.out_dir. Returns the written paths.
std::vector<std::string> write_compare_outputs(const ExperimentConfig& config, const CompareReport& report);

}  // namespace icenav
