#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icenav/world.hpp"

namespace icenav {

/// Experiment campaign configuration. Loaded from a versioned JSON document;
/// every CLI flag overrides the matching key. Defaults are desk scale.
struct ExperimentConfig {
    // world
    double channel_width = 12.0;
    double channel_length = 40.0;
    double goal_y = 32.0;
    double cell_size = 0.25;
    double lattice_spacing = 1.0;
    int n_headings = 16;
    double turn_radius = 2.5;
    int window_rows = 64;
    int window_cols = 48;
    double v_nom = 0.5;
    double start_x = 6.0;
    double start_y = 2.0;

    // campaign
    std::vector<double> concentrations{0.2, 0.3, 0.4, 0.5};
    int trials = 50;
    double alpha = 2000.0;
    std::vector<double> alpha_sweep;  // empty = just `alpha`
    std::uint64_t seed_base = 1;
    std::vector<std::string> planners{"predictive", "straight", "static-lattice"};
    bool replan = true;
    int workers = 1;
    int max_steps = 400;
    std::string out_dir = "out";

    // bound verification (small instances, whole-channel windows)
    int bound_instances = 100;
    long bound_max_nodes = 100000;
    double bound_channel_width = 6.0;
    double bound_channel_length = 12.0;
    double bound_goal_y = 8.0;
    double bound_start_x = 3.0;
    double bound_start_y = 2.0;

    // correlation study
    int correlate_entries = 2000;

    void validate() const;
    World make_world() const;
    World make_bound_world() const;

    static ExperimentConfig load_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

}  // namespace icenav
