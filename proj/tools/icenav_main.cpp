#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "icenav/config.hpp"
#include "icenav/errors.hpp"
#include "icenav/experiments.hpp"
#include "icenav/planner.hpp"
#include "icenav/render.hpp"

namespace {

using namespace icenav;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<double> concentration;
    std::optional<int> trials;
    std::optional<int> workers;
    std::optional<bool> replan;
    std::string out;
};

ExperimentConfig effective_config(const CommonFlags& f) {
    ExperimentConfig cfg =
        f.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load_file(f.config_path);
    if (f.seed) cfg.seed_base = *f.seed;
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.concentration) cfg.concentrations = {*f.concentration};
    if (f.trials) cfg.trials = *f.trials;
    if (f.workers) cfg.workers = *f.workers;
    if (f.replan) cfg.replan = *f.replan;
    if (!f.out.empty()) cfg.out_dir = f.out;
    cfg.validate();
    return cfg;
}

void write_file(const std::string& path, const std::string& text) {
    if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) {
        std::filesystem::create_directories(dir);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << text;
}

int cmd_gen(const CommonFlags& flags, double width, double length, double goal_y) {
    const double conc = flags.concentration.value_or(0.4);
    if (conc < 0.0 || conc > 0.6) {
        throw ValidationError("concentration must be in [0, 0.6]");
    }
    const std::uint64_t seed = flags.seed.value_or(1);
    Channel channel{width, length, goal_y};
    const IceField field = generate_scenario(conc, channel, seed);
    const std::string out = flags.out.empty() ? "field.json" : flags.out;
    save_field_file(field, out);
    std::printf("wrote %s: %zu floes, concentration %.4f\n", out.c_str(), field.floes().size(),
                field_concentration(field));
    return 0;
}

int cmd_plan(const CommonFlags& flags, const std::string& field_path, const std::string& planner,
             const std::string& model_path, double goal_y_flag, const std::string& svg_path) {
    const ExperimentConfig cfg = effective_config(flags);
    World world = cfg.make_world();
    const IceField field = load_field_file(field_path);
    world.channel = field.channel();
    world.grid = grid_for_channel(world.channel, cfg.cell_size);
    world.window_rows = std::min(world.window_rows, world.grid.rows);
    world.window_cols = std::min(world.window_cols, world.grid.cols);
    const double goal_y = goal_y_flag > 0.0 ? goal_y_flag : world.channel.goal_y;
    const double alpha = cfg.alpha;

    PathResult result;
    if (planner == "straight") {
        result = plan_straight(world.start, goal_y, field, world.control_set, world.ship, world.grid, alpha,
                               world.window_rows, world.window_cols, world.dynamics);
    } else if (planner == "static-lattice") {
        result = plan_static_lattice(world.start, rasterize(field, world.grid), goal_y, world.control_set,
                                     world.ship, alpha);
    } else if (planner == "predictive") {
        const OccupancyGrid global = rasterize(field, world.grid);
        if (!model_path.empty()) {
            LinearPredictor predictor = LinearPredictor::load_file(model_path);
            result = plan_predictive(world.start, global, goal_y, predictor, world.control_set, world.ship,
                                     alpha, world.window_rows, world.window_cols);
        } else {
            RolloutPredictor predictor(field, world.control_set, world.ship, world.grid, world.dynamics);
            result = plan_predictive(world.start, global, goal_y, predictor, world.control_set, world.ship,
                                     alpha, world.window_rows, world.window_cols);
        }
    } else {
        throw ValidationError("unknown planner '" + planner + "'");
    }

    std::ostringstream json;
    save_path_result(result, json);
    if (flags.out.empty()) {
        std::cout << json.str();
    } else {
        write_file(flags.out, json.str());
        std::printf("wrote %s\n", flags.out.c_str());
    }
    if (!svg_path.empty()) {
        write_file(svg_path, render_field_svg(field, &result.path, &world.control_set, &world.ship, nullptr));
        std::printf("wrote %s\n", svg_path.c_str());
    }
    std::printf("u=%.6f d=%.6f C=%.8f expanded=%ld predictions=%ld\n", result.total_cost, result.distance,
                result.collision_cost, result.nodes_expanded, result.predictions_made);
    return 0;
}

int cmd_run(const CommonFlags& flags) {
    const ExperimentConfig cfg = effective_config(flags);
    const CompareReport report = compare_planners(cfg);
    for (const std::string& path : write_compare_outputs(cfg, report)) {
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_correlate(const CommonFlags& flags, int entries) {
    ExperimentConfig cfg = effective_config(flags);
    if (entries > 0) cfg.correlate_entries = entries;
    const CorrelationReport report = correlation_study(cfg);
    const std::string csv = report.to_csv();
    std::printf("%ld entries\n%s", report.entries, csv.c_str());
    if (!flags.out.empty()) {
        write_file(flags.out, csv);
        std::printf("wrote %s\n", flags.out.c_str());
    }
    return 0;
}

int cmd_bound_check(const CommonFlags& flags, int instances) {
    ExperimentConfig cfg = effective_config(flags);
    if (instances > 0) cfg.bound_instances = instances;
    const BoundReport report = bound_check(cfg);
    std::printf("bound 1 + alpha/l_min = %.6f (alpha %.3f, l_min %.3f)\n", report.bound, report.alpha,
                report.l_min);
    std::printf("ratio max %.9f min %.9f over %zu instances (%d skipped as too large)\n", report.max_ratio,
                report.min_ratio, report.instances.size(), report.skipped);
    if (!flags.out.empty()) {
        write_file(flags.out, report.to_csv());
        std::printf("wrote %s\n", flags.out.c_str());
    }
    return report.max_ratio <= report.bound ? 0 : 2;
}

int cmd_collect(const CommonFlags& flags, std::uint64_t entries, const std::string& loss_report,
                const std::string& model_path, double lambda, const std::string& control_set_out) {
    const ExperimentConfig cfg = effective_config(flags);
    const World world = cfg.make_world();
    const double conc = flags.concentration.value_or(0.4);
    const std::uint64_t seed = flags.seed.value_or(1);
    const std::string out = flags.out.empty() ? "dataset.bin" : flags.out;

    if (!control_set_out.empty()) {
        // Same geometry the collector used, for external consumers.
        std::ostringstream cs_json;
        save_control_set(world.control_set, cs_json);
        write_file(control_set_out, cs_json.str());
        std::printf("wrote %s\n", control_set_out.c_str());
    }

    std::ofstream sink(out, std::ios::binary);
    if (!sink) throw ValidationError("cannot open for writing: " + out);
    const std::uint64_t n = collect_dataset(world, conc, entries, seed, sink);
    sink.close();
    std::printf("wrote %s: %llu entries\n", out.c_str(), static_cast<unsigned long long>(n));

    if (!loss_report.empty()) {
        std::ifstream in(out, std::ios::binary);
        const DatasetFile data = read_dataset(in);
        LinearPredictor predictor =
            model_path.empty() ? LinearPredictor{} : LinearPredictor::load_file(model_path);
        std::ostringstream csv;
        csv << "entry,huber,conservation,combined\n";
        char buf[128];
        for (std::size_t i = 0; i < data.entries.size(); ++i) {
            const DatasetEntry& e = data.entries[i];
            const OccupancyGrid predicted = predictor.predict_one(e.input);
            const double h = huber_occupancy_loss(predicted, e.target);
            const double c = conservation_loss(e.input.local_occupancy, predicted);
            std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g\n", i, h, c, h + lambda * c);
            csv << buf;
        }
        write_file(loss_report, csv.str());
        std::printf("wrote %s (lambda %.3f)\n", loss_report.c_str(), lambda);
    }
    return 0;
}

int cmd_render(const CommonFlags& flags, const std::string& field_path, const std::string& path_json,
               bool occupancy) {
    const ExperimentConfig cfg = effective_config(flags);
    const IceField field = load_field_file(field_path);
    const GridSpec grid = grid_for_channel(field.channel(), cfg.cell_size);

    World world = cfg.make_world();
    std::optional<Path> path;
    if (!path_json.empty()) {
        std::ifstream in(path_json);
        if (!in) throw ValidationError("cannot open path result: " + path_json);
        nlohmann::json j;
        in >> j;
        const auto& p0 = j.at("poses").at(0);
        path = concat_path(world.control_set, j.at("primitive_ids").get<std::vector<int>>(),
                           Pose{p0.at(0).get<double>(), p0.at(1).get<double>(), p0.at(2).get<int>()});
    }
    std::optional<OccupancyGrid> overlay;
    if (occupancy) overlay = rasterize(field, grid);

    const std::string svg = render_field_svg(field, path ? &*path : nullptr, &world.control_set, &world.ship,
                                             overlay ? &*overlay : nullptr);
    const std::string out = flags.out.empty() ? "field.svg" : flags.out;
    write_file(out, svg);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"icenav: ship-ice navigation planning toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    CommonFlags flags;
    app.add_option("--config", flags.config_path, "JSON config file");
    std::uint64_t seed_val = 0;
    double alpha_val = 0, conc_val = 0;
    int trials_val = 0, workers_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "base seed");
    auto* alpha_opt = app.add_option("--alpha", alpha_val, "collision cost scale");
    auto* conc_opt = app.add_option("--concentration", conc_val, "ice concentration in [0, 0.6]");
    auto* trials_opt = app.add_option("--trials", trials_val, "trials per concentration");
    auto* workers_opt = app.add_option("--workers", workers_val, "parallel trial workers");
    auto* replan_flag = app.add_flag("--replan", "replan after every executed primitive");
    auto* noreplan_flag = app.add_flag("--no-replan", "plan once and execute");
    app.add_option("--out", flags.out, "output path (file or directory by subcommand)");

    double gen_width = 12.0, gen_length = 76.0, gen_goal = 70.0;
    auto* gen = app.add_subcommand("gen", "generate a scenario and write it as JSON");
    gen->add_option("--width", gen_width, "channel width (m)");
    gen->add_option("--length", gen_length, "channel length (m)");
    gen->add_option("--goal-y", gen_goal, "goal line (m)");

    std::string plan_field, plan_planner = "predictive", plan_model, plan_svg;
    double plan_goal = 0.0;
    auto* plan = app.add_subcommand("plan", "plan one instance and write the path result");
    plan->add_option("--field", plan_field, "scenario JSON")->required();
    plan->add_option("--planner", plan_planner, "predictive | straight | static-lattice");
    plan->add_option("--model", plan_model, "linear predictor coefficients (JSON); default is the rollout predictor");
    plan->add_option("--goal-y", plan_goal, "override goal line");
    plan->add_option("--svg", plan_svg, "also render the plan to SVG");

    auto* run = app.add_subcommand("run", "planner comparison campaign");

    int correlate_entries = 0;
    auto* correlate = app.add_subcommand("correlate", "occupancy-diff vs collision-metric correlations");
    correlate->add_option("--entries", correlate_entries, "collision entries to collect");

    int bound_instances = 0;
    auto* bound = app.add_subcommand("bound-check", "performance bound verification");
    bound->add_option("--instances", bound_instances, "seeded instances");

    std::uint64_t collect_entries = 1000;
    std::string collect_loss, collect_model, collect_cs;
    double collect_lambda = 0.1;
    auto* collect = app.add_subcommand("collect", "random-policy training data export");
    collect->add_option("--entries", collect_entries, "entries to collect");
    collect->add_option("--loss-report", collect_loss, "also write a per-entry loss CSV");
    collect->add_option("--model", collect_model, "predictor coefficients for the loss report");
    collect->add_option("--lambda", collect_lambda, "conservation loss weight");
    collect->add_option("--control-set", collect_cs, "also export the control set geometry as JSON");

    std::string render_field_path, render_path_json;
    bool render_occupancy = false;
    auto* render = app.add_subcommand("render", "render a scenario (and optional path) to SVG");
    render->add_option("--field", render_field_path, "scenario JSON")->required();
    render->add_option("--path", render_path_json, "path result JSON to draw");
    render->add_flag("--occupancy", render_occupancy, "draw the occupancy heat layer");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (seed_opt->count()) flags.seed = seed_val;
    if (alpha_opt->count()) flags.alpha = alpha_val;
    if (conc_opt->count()) flags.concentration = conc_val;
    if (trials_opt->count()) flags.trials = trials_val;
    if (workers_opt->count()) flags.workers = workers_val;
    if (replan_flag->count()) flags.replan = true;
    if (noreplan_flag->count()) flags.replan = false;

    try {
        if (gen->parsed()) return cmd_gen(flags, gen_width, gen_length, gen_goal);
        if (plan->parsed()) return cmd_plan(flags, plan_field, plan_planner, plan_model, plan_goal, plan_svg);
        if (run->parsed()) return cmd_run(flags);
        if (correlate->parsed()) return cmd_correlate(flags, correlate_entries);
        if (bound->parsed()) return cmd_bound_check(flags, bound_instances);
        if (collect->parsed()) return cmd_collect(flags, collect_entries, collect_loss, collect_model, collect_lambda, collect_cs);
        if (render->parsed()) return cmd_render(flags, render_field_path, render_path_json, render_occupancy);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
