#include <benchmark/benchmark.h>

#include "icenav/config.hpp"
#include "icenav/planner.hpp"
#include "icenav/rng.hpp"

namespace {

using namespace icenav;

const World& bench_world() {
    static const World w = [] {
        ExperimentConfig cfg;
        return cfg.make_world();
    }();
    return w;
}

const IceField& bench_field() {
    static const IceField f = generate_scenario(0.4, bench_world().channel, 1);
    return f;
}

int straight_primitive(const World& w) {
    for (const int pid : w.control_set.by_heading[static_cast<std::size_t>(w.start.heading)]) {
        if (w.control_set.primitive(pid).end_heading == w.start.heading) return pid;
    }
    return -1;
}

void BM_generate_scenario(benchmark::State& state) {
    const World& w = bench_world();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_scenario(0.4, w.channel, ++seed));
    }
}
BENCHMARK(BM_generate_scenario)->Unit(benchmark::kMillisecond);

void BM_rasterize_full(benchmark::State& state) {
    const World& w = bench_world();
    const IceField& f = bench_field();
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize(f, w.grid));
    }
}
BENCHMARK(BM_rasterize_full)->Unit(benchmark::kMillisecond);

void BM_rasterize_window(benchmark::State& state) {
    const World& w = bench_world();
    const IceField& f = bench_field();
    const Window win = window_at(w.grid, {w.start.x, w.start.y}, w.window_rows, w.window_cols);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize_window(f, w.grid, win));
    }
}
BENCHMARK(BM_rasterize_window)->Unit(benchmark::kMicrosecond);

void BM_diff_mse(benchmark::State& state) {
    const GridSpec spec{0.25, 64, 48, {0, 0}};
    Rng rng(3);
    OccupancyGrid a(spec), b(spec);
    for (double& v : a.values()) v = rng.uniform();
    for (double& v : b.values()) v = rng.uniform();
    for (auto _ : state) {
        benchmark::DoNotOptimize(diff_mse(a, b));
    }
}
BENCHMARK(BM_diff_mse)->Unit(benchmark::kMicrosecond);

void BM_diff_neg_ssim(benchmark::State& state) {
    const GridSpec spec{0.25, 64, 48, {0, 0}};
    Rng rng(3);
    OccupancyGrid a(spec), b(spec);
    for (double& v : a.values()) v = rng.uniform();
    for (double& v : b.values()) v = rng.uniform();
    for (auto _ : state) {
        benchmark::DoNotOptimize(diff_neg_ssim(a, b));
    }
}
BENCHMARK(BM_diff_neg_ssim)->Unit(benchmark::kMicrosecond);

void BM_diff_emd(benchmark::State& state) {
    const GridSpec spec{0.25, 64, 48, {0, 0}};
    Rng rng(3);
    OccupancyGrid a(spec), b(spec);
    for (double& v : a.values()) v = rng.uniform();
    for (double& v : b.values()) v = rng.uniform();
    for (auto _ : state) {
        benchmark::DoNotOptimize(diff_emd(a, b));
    }
}
BENCHMARK(BM_diff_emd)->Unit(benchmark::kMicrosecond);

void BM_step_primitive(benchmark::State& state) {
    const World& w = bench_world();
    const IceField& f = bench_field();
    const MotionPrimitive& prim = w.control_set.primitive(straight_primitive(w));
    for (auto _ : state) {
        benchmark::DoNotOptimize(step_primitive(f, w.start, prim, w.ship, w.dynamics));
    }
}
BENCHMARK(BM_step_primitive)->Unit(benchmark::kMicrosecond);

void BM_swath_atlas(benchmark::State& state) {
    const World& w = bench_world();
    const SwathAtlas atlas(w.control_set, w.ship, w.grid);
    const int pid = straight_primitive(w);
    for (auto _ : state) {
        benchmark::DoNotOptimize(atlas.swath(w.start, pid));
    }
}
BENCHMARK(BM_swath_atlas)->Unit(benchmark::kMicrosecond);

void BM_swath_direct(benchmark::State& state) {
    const World& w = bench_world();
    const MotionPrimitive& prim = w.control_set.primitive(straight_primitive(w));
    for (auto _ : state) {
        benchmark::DoNotOptimize(swath_cells(w.start, prim, w.control_set, w.ship, w.grid));
    }
}
BENCHMARK(BM_swath_direct)->Unit(benchmark::kMicrosecond);

void BM_plan_predictive(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.channel_length = 24.0;
    cfg.goal_y = 16.0;
    const World w = cfg.make_world();
    const IceField f = generate_scenario(0.4, w.channel, 1);
    const OccupancyGrid global = rasterize(f, w.grid);
    for (auto _ : state) {
        RolloutPredictor pred(f, w.control_set, w.ship, w.grid, w.dynamics);
        benchmark::DoNotOptimize(plan_predictive(w.start, global, w.channel.goal_y, pred, w.control_set,
                                                 w.ship, 1500.0, w.window_rows, w.window_cols));
    }
}
BENCHMARK(BM_plan_predictive)->Unit(benchmark::kMillisecond);

void BM_plan_static(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.channel_length = 24.0;
    cfg.goal_y = 16.0;
    const World w = cfg.make_world();
    const IceField f = generate_scenario(0.4, w.channel, 1);
    const OccupancyGrid global = rasterize(f, w.grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            plan_static_lattice(w.start, global, w.channel.goal_y, w.control_set, w.ship, 1500.0));
    }
}
BENCHMARK(BM_plan_static)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
