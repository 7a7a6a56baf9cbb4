#include "icenav/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "icenav/errors.hpp"
#include "icenav/render.hpp"
#include "icenav/rng.hpp"

namespace icenav {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<int> straight_path_ids(const Pose& start, double y_goal, const ControlSet& cs,
                                   const ShipShape& shape, const GridSpec& grid) {
    int straight = -1;
    for (const int pid : cs.by_heading.at(static_cast<std::size_t>(start.heading))) {
        const MotionPrimitive& p = cs.primitive(pid);
        if (p.start_heading == p.end_heading && p.segments.size() == 1 && p.segments[0].curvature == 0.0) {
            straight = pid;
        }
    }
    if (straight < 0) throw NoPathError("straight planner: start heading has no straight primitive");
    std::vector<int> ids;
    Pose cur = start;
    while (cur.y < y_goal) {
        const MotionPrimitive& prim = cs.primitive(straight);
        if (!primitive_feasible(cur, prim, cs, shape, grid)) {
            throw NoPathError("straight planner: run leaves the channel before the goal line");
        }
        ids.push_back(straight);
        cur = apply_primitive(cs, cur, prim);
    }
    return ids;
}

}  // namespace

TrialRecord run_trial(const World& world, const std::string& planner_id, const IceField& scenario,
                      std::uint64_t seed, double alpha, bool replan, int max_steps) {
    TrialRecord rec;
    rec.planner = planner_id;
    rec.seed = seed;
    rec.concentration = field_concentration(scenario);
    rec.alpha = alpha;
    const auto t0 = std::chrono::steady_clock::now();

    const double goal = world.channel.goal_y;
    IceField field = scenario;
    Pose pose = world.start;

    while (pose.y < goal && rec.status == TrialStatus::ok) {
        if (rec.metrics.steps >= max_steps) {
            rec.status = TrialStatus::step_cap;
            break;
        }
        std::vector<int> plan_ids;
        try {
            if (planner_id == "straight") {
                plan_ids = straight_path_ids(pose, goal, world.control_set, world.ship, world.grid);
            } else if (planner_id == "static-lattice") {
                const OccupancyGrid global = rasterize(field, world.grid);
                const PathResult pr = plan_static_lattice(pose, global, goal, world.control_set, world.ship, alpha);
                plan_ids = pr.path.primitive_ids;
                rec.nodes_expanded += pr.nodes_expanded;
            } else if (planner_id == "predictive") {
                const OccupancyGrid global = rasterize(field, world.grid);
                RolloutPredictor predictor(field, world.control_set, world.ship, world.grid, world.dynamics);
                const PathResult pr =
                    plan_predictive(pose, global, goal, predictor, world.control_set, world.ship, alpha,
                                    world.window_rows, world.window_cols);
                plan_ids = pr.path.primitive_ids;
                rec.nodes_expanded += pr.nodes_expanded;
                rec.predictions += pr.predictions_made;
            } else {
                throw ValidationError("unknown planner '" + planner_id + "'");
            }
        } catch (const NoPathError&) {
            rec.status = TrialStatus::no_path;
            break;
        }
        if (plan_ids.empty()) break;

        const std::size_t n_exec = replan ? 1 : plan_ids.size();
        for (std::size_t i = 0; i < n_exec && rec.metrics.steps < max_steps; ++i) {
            const MotionPrimitive& prim = world.control_set.primitive(plan_ids[i]);
            const Window w = window_at(world.grid, Vec2{pose.x, pose.y}, world.window_rows, world.window_cols);
            const OccupancyGrid before = rasterize_window(field, world.grid, w);
            StepResult step = step_primitive(field, pose, prim, world.ship, world.dynamics);
            const OccupancyGrid after = rasterize_window(step.field_after, world.grid, w);
            rec.collision_cost += diff_mse(before, after);
            rec.metrics.distance += prim.arc_length;
            rec.metrics.ke_loss += step.metrics.ke_loss;
            rec.metrics.impulse += step.metrics.impulse;
            rec.metrics.w_approx += step.metrics.w_approx;
            rec.metrics.residual_overlap = std::max(rec.metrics.residual_overlap, step.metrics.residual_overlap);
            rec.metrics.steps += 1;
            field = std::move(step.field_after);
            pose = apply_primitive(world.control_set, pose, prim);
        }
        if (!replan) break;
    }
    if (rec.status == TrialStatus::ok && pose.y < goal && rec.metrics.steps >= max_steps) {
        rec.status = TrialStatus::step_cap;
    }
    rec.total_cost = rec.metrics.distance + alpha * rec.collision_cost;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

struct PearsonResult {
    double r = 0.0;
    bool defined = false;
};

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return {};
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return {};
    return {sxy / std::sqrt(sxx * syy), true};
}

// Reference correlations from the tank-scale simulator study this analysis
// mirrors; printed alongside our rows for side-by-side comparison.
constexpr double kReference[3][3] = {{0.77, 0.95, 0.96}, {0.70, 0.88, 0.90}, {0.66, 0.88, 0.89}};
const char* const kDiffNames[3] = {"mse", "neg_ssim", "emd"};

}  // namespace

std::string CorrelationReport::to_csv() const {
    std::ostringstream out;
    out << "diff,ke_loss,impulse,w_approx\n";
    for (int i = 0; i < 3; ++i) {
        out << kDiffNames[i];
        for (int j = 0; j < 3; ++j) {
            out << ',' << (defined[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                               ? fmt(pearson[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                               : "undefined");
        }
        out << '\n';
    }
    for (int i = 0; i < 3; ++i) {
        out << "reference_" << kDiffNames[i];
        for (int j = 0; j < 3; ++j) out << ',' << fmt(kReference[i][j]);
        out << '\n';
    }
    return out.str();
}

CorrelationReport correlation_study(const ExperimentConfig& config) {
    config.validate();
    const World world = config.make_world();
    const long per_conc =
        (config.correlate_entries + static_cast<long>(config.concentrations.size()) - 1) /
        static_cast<long>(config.concentrations.size());

    std::vector<CollisionEntry> entries;
    for (std::size_t ci = 0; ci < config.concentrations.size(); ++ci) {
        const double conc = config.concentrations[ci];
        const std::uint64_t seed = config.seed_base + 1000003ull * ci;
        IceField field = generate_scenario(conc, world.channel, seed);
        Pose pose = world.start;
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        long made = 0;
        while (made < per_conc) {
            const std::vector<int> feasible =
                feasible_primitives(pose, world.control_set, world.ship, world.grid);
            if (feasible.empty() || pose.y >= world.channel.goal_y) {
                pose = world.start;
                continue;
            }
            const MotionPrimitive& prim =
                world.control_set.primitive(feasible[rng.uniform_int(feasible.size())]);
            const Window w = window_at(world.grid, Vec2{pose.x, pose.y}, world.window_rows, world.window_cols);
            const OccupancyGrid before = rasterize_window(field, world.grid, w);
            StepResult step = step_primitive(field, pose, prim, world.ship, world.dynamics);
            const OccupancyGrid after = rasterize_window(step.field_after, world.grid, w);
            CollisionEntry e;
            e.mse = diff_mse(before, after);
            e.neg_ssim = diff_neg_ssim(before, after);
            e.emd = diff_emd(before, after);
            e.ke_loss = step.metrics.ke_loss;
            e.impulse = step.metrics.impulse;
            e.w_approx = step.metrics.w_approx;
            entries.push_back(e);
            ++made;
            field = std::move(step.field_after);
            pose = apply_primitive(world.control_set, pose, prim);
        }
    }

    CorrelationReport report;
    report.entries = static_cast<long>(entries.size());
    std::array<std::vector<double>, 3> diffs;
    std::array<std::vector<double>, 3> metrics;
    for (const CollisionEntry& e : entries) {
        diffs[0].push_back(e.mse);
        diffs[1].push_back(e.neg_ssim);
        diffs[2].push_back(e.emd);
        metrics[0].push_back(e.ke_loss);
        metrics[1].push_back(e.impulse);
        metrics[2].push_back(e.w_approx);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const PearsonResult p = pearson(diffs[static_cast<std::size_t>(i)], metrics[static_cast<std::size_t>(j)]);
            report.pearson[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p.r;
            report.defined[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p.defined;
        }
    }
    return report;
}

std::string BoundReport::to_csv() const {
    std::ostringstream out;
    out << "seed,concentration,u_alg,u_opt,ratio,skipped\n";
    for (const BoundInstance& b : instances) {
        out << b.seed << ',' << fmt(b.concentration) << ',' << fmt(b.u_alg) << ',' << fmt(b.u_opt) << ','
            << fmt(b.ratio) << ',' << (b.skipped ? 1 : 0) << '\n';
    }
    return out.str();
}

BoundReport bound_check(const ExperimentConfig& config) {
    config.validate();
    const World world = config.make_bound_world();
    BoundReport report;
    report.alpha = config.alpha;
    report.l_min = world.control_set.l_min;
    report.bound = 1.0 + config.alpha / world.control_set.l_min;
    report.max_ratio = 0.0;
    report.min_ratio = std::numeric_limits<double>::infinity();

    for (int i = 0; i < config.bound_instances; ++i) {
        BoundInstance inst;
        inst.seed = config.seed_base + static_cast<std::uint64_t>(i);
        inst.concentration = config.concentrations[static_cast<std::size_t>(i) % config.concentrations.size()];
        const IceField field = generate_scenario(inst.concentration, world.channel, inst.seed);
        try {
            const PathResult opt =
                optimal_oracle(world.start, field, world.channel.goal_y, world.control_set, world.ship,
                               world.grid, config.alpha, config.bound_max_nodes, world.window_rows,
                               world.window_cols, world.dynamics);
            const OccupancyGrid global = rasterize(field, world.grid);
            RolloutPredictor predictor(field, world.control_set, world.ship, world.grid, world.dynamics);
            const PathResult alg =
                plan_predictive(world.start, global, world.channel.goal_y, predictor, world.control_set,
                                world.ship, config.alpha, world.window_rows, world.window_cols);
            inst.u_alg = alg.total_cost;
            inst.u_opt = opt.total_cost;
            inst.ratio = alg.total_cost / opt.total_cost;
            report.max_ratio = std::max(report.max_ratio, inst.ratio);
            report.min_ratio = std::min(report.min_ratio, inst.ratio);
        } catch (const InstanceTooLargeError&) {
            inst.skipped = true;
            ++report.skipped;
        }
        report.instances.push_back(inst);
    }
    return report;
}

namespace {

struct Job {
    std::string planner;
    double alpha = 0.0;
    double concentration = 0.0;
    std::uint64_t seed = 0;
};

double quantile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

std::string CompareReport::trials_csv() const {
    std::ostringstream out;
    out << "planner,alpha,concentration,seed,status,distance,ke_loss,impulse,w_approx,collision_cost,"
           "total_cost,steps,residual_overlap,predictions,nodes_expanded\n";
    for (const TrialRecord& r : records) {
        out << r.planner << ',' << fmt(r.alpha) << ',' << fmt(r.concentration) << ',' << r.seed << ','
            << static_cast<int>(r.status) << ',' << fmt(r.metrics.distance) << ',' << fmt(r.metrics.ke_loss)
            << ',' << fmt(r.metrics.impulse) << ',' << fmt(r.metrics.w_approx) << ',' << fmt(r.collision_cost)
            << ',' << fmt(r.total_cost) << ',' << r.metrics.steps << ',' << fmt(r.metrics.residual_overlap)
            << ',' << r.predictions << ',' << r.nodes_expanded << '\n';
    }
    return out.str();
}

std::string CompareReport::summary_csv() const {
    // Group records in first-seen order (records are already deterministic).
    struct Key {
        std::string planner;
        double alpha;
        double conc;
        bool operator==(const Key&) const = default;
    };
    std::vector<Key> keys;
    std::vector<std::vector<const TrialRecord*>> groups;
    for (const TrialRecord& r : records) {
        const Key k{r.planner, r.alpha, r.concentration};
        std::size_t gi = 0;
        for (; gi < keys.size(); ++gi) {
            if (keys[gi] == k) break;
        }
        if (gi == keys.size()) {
            keys.push_back(k);
            groups.emplace_back();
        }
        groups[gi].push_back(&r);
    }

    std::ostringstream out;
    out << "planner,alpha,concentration,n,n_failed";
    for (const char* m : {"distance", "ke_loss", "impulse", "w_approx", "collision_cost", "total_cost"}) {
        out << ',' << m << "_median," << m << "_q1," << m << "_q3";
    }
    out << '\n';
    for (std::size_t gi = 0; gi < keys.size(); ++gi) {
        std::vector<double> vals[6];
        int failed = 0;
        for (const TrialRecord* r : groups[gi]) {
            if (r->status != TrialStatus::ok) {
                ++failed;
                continue;
            }
            vals[0].push_back(r->metrics.distance);
            vals[1].push_back(r->metrics.ke_loss);
            vals[2].push_back(r->metrics.impulse);
            vals[3].push_back(r->metrics.w_approx);
            vals[4].push_back(r->collision_cost);
            vals[5].push_back(r->total_cost);
        }
        out << keys[gi].planner << ',' << fmt(keys[gi].alpha) << ',' << fmt(keys[gi].conc) << ','
            << groups[gi].size() << ',' << failed;
        for (auto& v : vals) {
            out << ',' << fmt(quantile(v, 0.5)) << ',' << fmt(quantile(v, 0.25)) << ',' << fmt(quantile(v, 0.75));
        }
        out << '\n';
    }
    return out.str();
}

CompareReport compare_planners(const ExperimentConfig& config) {
    config.validate();
    const World world = config.make_world();

    std::vector<double> alphas = config.alpha_sweep;
    if (alphas.empty()) alphas.push_back(config.alpha);

    std::vector<Job> jobs;
    for (const std::string& planner : config.planners) {
        for (const double alpha : alphas) {
            for (std::size_t ci = 0; ci < config.concentrations.size(); ++ci) {
                for (int t = 0; t < config.trials; ++t) {
                    const std::uint64_t scenario_seed =
                        config.seed_base + 100003ull * ci + static_cast<std::uint64_t>(t);
                    jobs.push_back({planner, alpha, config.concentrations[ci], scenario_seed});
                }
            }
        }
    }

    CompareReport report;
    report.records.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            const IceField scenario = generate_scenario(job.concentration, world.channel, job.seed);
            report.records[i] =
                run_trial(world, job.planner, scenario, job.seed, job.alpha, config.replan, config.max_steps);
            // Group by the target concentration, not the achieved one.
            report.records[i].concentration = job.concentration;
        }
    };
    const int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return report;
}

std::vector<std::string> write_compare_outputs(const ExperimentConfig& config, const CompareReport& report) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    std::vector<std::string> written;

    const auto write_text = [&](const std::string& name, const std::string& text) {
        const std::string path = (fs::path(config.out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot open for writing: " + path);
        out << text;
        written.push_back(path);
    };
    write_text("trials.csv", report.trials_csv());
    write_text("summary.csv", report.summary_csv());

    const char* const metric_names[4] = {"w_approx", "impulse", "ke_loss", "distance"};
    for (const double conc : config.concentrations) {
        for (int mi = 0; mi < 4; ++mi) {
            std::vector<std::pair<std::string, std::vector<double>>> groups;
            for (const TrialRecord& r : report.records) {
                if (r.concentration > conc + 0.025 || r.concentration < conc - 0.025) continue;
                if (r.status != TrialStatus::ok) continue;
                const std::string label = r.planner + " a=" + fmt(r.alpha);
                const double v = mi == 0   ? r.metrics.w_approx
                                 : mi == 1 ? r.metrics.impulse
                                 : mi == 2 ? r.metrics.ke_loss
                                           : r.metrics.distance;
                std::size_t gi = 0;
                for (; gi < groups.size(); ++gi) {
                    if (groups[gi].first == label) break;
                }
                if (gi == groups.size()) groups.push_back({label, {}});
                groups[gi].second.push_back(v);
            }
            if (groups.empty()) continue;
            char name[64];
            std::snprintf(name, sizeof name, "box_%s_c%02d.svg", metric_names[mi],
                          static_cast<int>(std::lround(conc * 100)));
            write_text(name, render_boxplot_svg(std::string(metric_names[mi]) + " at concentration " + fmt(conc),
                                                metric_names[mi], groups));
        }
    }
    return written;
}

}  // namespace icenav
