#include "icenav/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"

namespace icenav {

namespace {

const std::vector<std::string> kKnownPlanners = {"predictive", "straight", "static-lattice"};

int heading_up(const ControlSet& cs) {
    for (int h = 0; h < cs.n_headings; ++h) {
        if (cs.heading_dir[static_cast<std::size_t>(h)].x == 0.0 &&
            cs.heading_dir[static_cast<std::size_t>(h)].y == 1.0) {
            return h;
        }
    }
    throw ValidationError("control set lacks a +y heading");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw ValidationError("config: trials must be at least 1");
    if (workers < 1) throw ValidationError("config: workers must be at least 1");
    if (alpha < 0.0) throw ValidationError("config: alpha must be non-negative");
    if (max_steps < 1) throw ValidationError("config: max_steps must be at least 1");
    if (concentrations.empty()) throw ValidationError("config: at least one concentration required");
    for (const double c : concentrations) {
        if (c < 0.0 || c > 0.6) throw ValidationError("config: concentrations must be in [0, 0.6]");
    }
    for (const double a : alpha_sweep) {
        if (a < 0.0) throw ValidationError("config: alpha_sweep values must be non-negative");
    }
    if (planners.empty()) throw ValidationError("config: at least one planner required");
    for (const std::string& p : planners) {
        if (std::find(kKnownPlanners.begin(), kKnownPlanners.end(), p) == kKnownPlanners.end()) {
            throw ValidationError("config: unknown planner '" + p + "'");
        }
    }
    validate_channel(Channel{channel_width, channel_length, goal_y});
    validate_channel(Channel{bound_channel_width, bound_channel_length, bound_goal_y});
}

World ExperimentConfig::make_world() const {
    World w;
    w.channel = Channel{channel_width, channel_length, goal_y};
    w.grid = grid_for_channel(w.channel, cell_size);
    w.control_set = generate_control_set(lattice_spacing, n_headings, turn_radius);
    w.ship = default_ship();
    w.dynamics = DynamicsParams{0.5 * cell_size, v_nom, 32, 1e-6};
    w.window_rows = std::min(window_rows, w.grid.rows);
    w.window_cols = std::min(window_cols, w.grid.cols);
    w.start = Pose{start_x, start_y, heading_up(w.control_set)};
    return w;
}

World ExperimentConfig::make_bound_world() const {
    World w;
    w.channel = Channel{bound_channel_width, bound_channel_length, bound_goal_y};
    w.grid = grid_for_channel(w.channel, cell_size);
    w.control_set = generate_control_set(lattice_spacing, n_headings, turn_radius);
    w.ship = default_ship();
    w.dynamics = DynamicsParams{0.5 * cell_size, v_nom, 32, 1e-6};
    // Whole-channel windows: small instances never suffer boundary effects.
    w.window_rows = w.grid.rows;
    w.window_cols = w.grid.cols;
    w.start = Pose{bound_start_x, bound_start_y, heading_up(w.control_set)};
    return w;
}

namespace {

ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.value("version", 1) != 1) {
        throw ValidationError("config: unsupported schema version");
    }
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        c.channel_width = ch.value("width", c.channel_width);
        c.channel_length = ch.value("length", c.channel_length);
        c.goal_y = ch.value("goal_y", c.goal_y);
    }
    if (j.contains("grid")) c.cell_size = j.at("grid").value("cell_size", c.cell_size);
    if (j.contains("lattice")) {
        const auto& l = j.at("lattice");
        c.lattice_spacing = l.value("spacing", c.lattice_spacing);
        c.n_headings = l.value("n_headings", c.n_headings);
        c.turn_radius = l.value("turn_radius", c.turn_radius);
    }
    if (j.contains("window")) {
        c.window_rows = j.at("window").value("rows", c.window_rows);
        c.window_cols = j.at("window").value("cols", c.window_cols);
    }
    if (j.contains("dynamics")) c.v_nom = j.at("dynamics").value("v_nom", c.v_nom);
    if (j.contains("start")) {
        c.start_x = j.at("start").value("x", c.start_x);
        c.start_y = j.at("start").value("y", c.start_y);
    }
    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        c.concentrations = e.value("concentrations", c.concentrations);
        c.trials = e.value("trials", c.trials);
        c.alpha = e.value("alpha", c.alpha);
        c.alpha_sweep = e.value("alpha_sweep", c.alpha_sweep);
        c.seed_base = e.value("seed_base", c.seed_base);
        c.planners = e.value("planners", c.planners);
        c.replan = e.value("replan", c.replan);
        c.workers = e.value("workers", c.workers);
        c.max_steps = e.value("max_steps", c.max_steps);
        c.out_dir = e.value("out_dir", c.out_dir);
    }
    if (j.contains("bound")) {
        const auto& b = j.at("bound");
        c.bound_instances = b.value("instances", c.bound_instances);
        c.bound_max_nodes = b.value("max_nodes", c.bound_max_nodes);
        if (b.contains("channel")) {
            const auto& ch = b.at("channel");
            c.bound_channel_width = ch.value("width", c.bound_channel_width);
            c.bound_channel_length = ch.value("length", c.bound_channel_length);
            c.bound_goal_y = ch.value("goal_y", c.bound_goal_y);
        }
        c.bound_start_x = b.value("start_x", c.bound_start_x);
        c.bound_start_y = b.value("start_y", c.bound_start_y);
    }
    if (j.contains("correlate")) c.correlate_entries = j.at("correlate").value("entries", c.correlate_entries);
    c.validate();
    return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    return nlohmann::json{
        {"version", 1},
        {"channel", {{"width", c.channel_width}, {"length", c.channel_length}, {"goal_y", c.goal_y}}},
        {"grid", {{"cell_size", c.cell_size}}},
        {"lattice",
         {{"spacing", c.lattice_spacing}, {"n_headings", c.n_headings}, {"turn_radius", c.turn_radius}}},
        {"window", {{"rows", c.window_rows}, {"cols", c.window_cols}}},
        {"dynamics", {{"v_nom", c.v_nom}}},
        {"start", {{"x", c.start_x}, {"y", c.start_y}}},
        {"experiment",
         {{"concentrations", c.concentrations},
          {"trials", c.trials},
          {"alpha", c.alpha},
          {"alpha_sweep", c.alpha_sweep},
          {"seed_base", c.seed_base},
          {"planners", c.planners},
          {"replan", c.replan},
          {"workers", c.workers},
          {"max_steps", c.max_steps},
          {"out_dir", c.out_dir}}},
        {"bound",
         {{"instances", c.bound_instances},
          {"max_nodes", c.bound_max_nodes},
          {"channel",
           {{"width", c.bound_channel_width},
            {"length", c.bound_channel_length},
            {"goal_y", c.bound_goal_y}}},
          {"start_x", c.bound_start_x},
          {"start_y", c.bound_start_y}}},
        {"correlate", {{"entries", c.correlate_entries}}}};
}

}  // namespace

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

std::string ExperimentConfig::to_json_text() const { return to_json(*this).dump(2) + "\n"; }

}  // namespace icenav
