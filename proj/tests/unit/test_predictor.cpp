#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icenav/errors.hpp"
#include "icenav/predictor.hpp"

using namespace icenav;

namespace {

World small_world() {
    World w;
    w.channel = Channel{12.0, 24.0, 20.0};
    w.grid = grid_for_channel(w.channel, 0.25);
    w.control_set = generate_control_set(1.0, 16, 2.5);
    w.ship = default_ship();
    w.window_rows = 48;
    w.window_cols = 48;
    w.start = Pose{6.0, 2.0, 4};
    return w;
}

int straight_of(const World& w, int heading) {
    for (const int pid : w.control_set.by_heading[static_cast<std::size_t>(heading)]) {
        if (w.control_set.primitive(pid).end_heading == heading) return pid;
    }
    return -1;
}

}  // namespace

TEST_CASE("assemble_input layers agree with the lattice cell sets") {
    const World w = small_world();
    const IceField field = generate_scenario(0.3, w.channel, 5);
    const OccupancyGrid global = rasterize(field, w.grid);
    const MotionPrimitive& prim = w.control_set.primitive(straight_of(w, 4));
    const PredictionInput in =
        assemble_input(global, w.start, prim, w.control_set, w.ship, w.window_rows, w.window_cols);

    REQUIRE(in.local_occupancy.rows() == w.window_rows);
    REQUIRE(in.local_occupancy.cols() == w.window_cols);
    REQUIRE(in.footprint_mask.size() == in.swath_mask.size());

    const CellSet fp = footprint_cells(w.start, w.control_set, w.ship, w.grid);
    const CellSet sw = swath_cells(w.start, prim, w.control_set, w.ship, w.grid);
    std::size_t fp_on = 0, sw_on = 0;
    for (std::size_t i = 0; i < in.footprint_mask.size(); ++i) {
        fp_on += in.footprint_mask[i];
        sw_on += in.swath_mask[i];
        // footprint must be a subset of the swath
        if (in.footprint_mask[i]) CHECK(in.swath_mask[i] == 1);
    }
    CHECK(fp_on == fp.size());
    CHECK(sw_on == sw.size());
    for (const GridCell& cell : sw) {
        const int r = cell.r - in.window.row0;
        const int c = cell.c - in.window.col0;
        REQUIRE(r >= 0);
        REQUIRE(c >= 0);
        CHECK(in.swath_mask[static_cast<std::size_t>(r) * in.window.cols + c] == 1);
    }
    // Occupancy layer equals the cropped global.
    const OccupancyGrid local = crop(global, in.window);
    CHECK(local.values() == in.local_occupancy.values());

    SUBCASE("empty field gives an all-zero occupancy layer but the same masks") {
        const OccupancyGrid empty_global = rasterize(IceField(w.channel, {}), w.grid);
        const PredictionInput e =
            assemble_input(empty_global, w.start, prim, w.control_set, w.ship, w.window_rows, w.window_cols);
        CHECK(grid_sum(e.local_occupancy) == 0.0);
        CHECK(e.footprint_mask == in.footprint_mask);
        CHECK(e.swath_mask == in.swath_mask);
        CHECK(fp_on > 0);
    }
    SUBCASE("a window too small for the swath is rejected") {
        CHECK_THROWS_AS(assemble_input(global, w.start, prim, w.control_set, w.ship, 8, 8), ValidationError);
    }
}

TEST_CASE("rollout_predict is exactly rasterize-step-crop") {
    const World w = small_world();
    const IceField field = generate_scenario(0.4, w.channel, 11);
    const MotionPrimitive& prim = w.control_set.primitive(straight_of(w, 4));
    const OccupancyGrid global = rasterize(field, w.grid);
    const PredictionInput in =
        assemble_input(global, w.start, prim, w.control_set, w.ship, w.window_rows, w.window_cols);

    const OccupancyGrid predicted = rollout_predict(in, field, w.start, prim, w.ship, w.grid, w.dynamics);
    const StepResult step = step_primitive(field, w.start, prim, w.ship, w.dynamics);
    const OccupancyGrid direct = crop(rasterize(step.field_after, w.grid), in.window);
    CHECK(predicted.values() == direct.values());  // bit-exact

    SUBCASE("open water window is a fixed point") {
        const IceField empty(w.channel, {});
        const OccupancyGrid zero_global = rasterize(empty, w.grid);
        const PredictionInput e =
            assemble_input(zero_global, w.start, prim, w.control_set, w.ship, w.window_rows, w.window_cols);
        const OccupancyGrid out = rollout_predict(e, empty, w.start, prim, w.ship, w.grid, w.dynamics);
        CHECK(out.values() == e.local_occupancy.values());
    }
    SUBCASE("inconsistent input occupancy is a contract violation") {
        PredictionInput bad = in;
        bad.local_occupancy.at(0, 0) += 0.25;
        CHECK_THROWS_AS(rollout_predict(bad, field, w.start, prim, w.ship, w.grid, w.dynamics),
                        ValidationError);
    }
    SUBCASE("conservation holds on interior windows") {
        const double before = grid_sum(in.local_occupancy);
        const double after = grid_sum(predicted);
        CHECK(std::abs(after - before) <= 0.005 * before);
    }
}

TEST_CASE("rollout predictor tracks fields along prediction chains") {
    const World w = small_world();
    const IceField field = generate_scenario(0.4, w.channel, 13);
    const OccupancyGrid global = rasterize(field, w.grid);
    RolloutPredictor pred(field, w.control_set, w.ship, w.grid, w.dynamics);

    const int s4 = straight_of(w, 4);
    const MotionPrimitive& prim = w.control_set.primitive(s4);

    // Root edge.
    PredictionInput in1 =
        assemble_input(global, w.start, prim, w.control_set, w.ship, w.window_rows, w.window_cols);
    const OccupancyGrid out1 = pred.predict_one(in1);
    const StepResult step1 = step_primitive(field, w.start, prim, w.ship, w.dynamics);
    CHECK(out1.values() == rasterize_window(step1.field_after, w.grid, in1.window).values());

    // Second edge along the chain: provenance names the accepted parent edge.
    const Pose p2 = apply_primitive(w.control_set, w.start, prim);
    const OccupancyGrid global2 = stitch(global, out1, in1.window);
    PredictionInput in2 =
        assemble_input(global2, p2, prim, w.control_set, w.ship, w.window_rows, w.window_cols);
    in2.provenance.incoming = EdgeRef{w.start, s4};
    const OccupancyGrid out2 = pred.predict_one(in2);
    const StepResult step2 = step_primitive(step1.field_after, p2, prim, w.ship, w.dynamics);
    CHECK(out2.values() == rasterize_window(step2.field_after, w.grid, in2.window).values());

    SUBCASE("unknown provenance is rejected") {
        PredictionInput bad = in2;
        bad.provenance.incoming = EdgeRef{Pose{5.0, 7.0, 4}, s4};
        CHECK_THROWS_AS(pred.predict_one(bad), ValidationError);
    }
    SUBCASE("field_after returns the tracked ground truth") {
        const IceField f1 = pred.field_after(EdgeRef{w.start, s4});
        REQUIRE(f1.floes().size() == step1.field_after.floes().size());
        for (std::size_t i = 0; i < f1.floes().size(); ++i) {
            CHECK(f1.floes()[i].vertices == step1.field_after.floes()[i].vertices);
        }
    }
}

TEST_CASE("sequential window predictions track a 3-step rollout") {
    const World w = small_world();
    const IceField field = generate_scenario(0.35, w.channel, 21);
    RolloutPredictor pred(field, w.control_set, w.ship, w.grid, w.dynamics);

    const int s4 = straight_of(w, 4);
    OccupancyGrid global = rasterize(field, w.grid);
    Pose pose = w.start;
    std::optional<EdgeRef> incoming;
    IceField truth = field;
    double sum_before = grid_sum(global);
    bool wall = false;
    for (int i = 0; i < 3; ++i) {
        const MotionPrimitive& prim = w.control_set.primitive(s4);
        PredictionInput in =
            assemble_input(global, pose, prim, w.control_set, w.ship, w.window_rows, w.window_cols);
        in.provenance.incoming = incoming;
        const OccupancyGrid out = pred.predict_one(in);
        global = stitch(global, out, in.window);
        incoming = EdgeRef{pose, s4};
        StepResult st = step_primitive(truth, pose, prim, w.ship, w.dynamics);
        wall |= st.metrics.wall_contact;
        truth = std::move(st.field_after);
        pose = apply_primitive(w.control_set, pose, prim);
    }
    REQUIRE_FALSE(wall);  // instance chosen so nothing reaches the walls
    const OccupancyGrid truth_grid = rasterize(truth, w.grid);
    CHECK(std::abs(grid_sum(global) - grid_sum(truth_grid)) <= 3 * 0.005 * sum_before);
}

TEST_CASE("loss functions") {
    const GridSpec spec{0.25, 8, 8, {0, 0}};
    OccupancyGrid target(spec), pred(spec), input(spec);

    SUBCASE("identical grids cost nothing") {
        CHECK(huber_occupancy_loss(pred, target) == 0.0);
        CHECK(conservation_loss(input, pred) == 0.0);
        CHECK(combined_loss(input, pred, target) == 0.0);
    }
    SUBCASE("quadratic region") {
        for (double& v : pred.values()) v = 0.1;
        CHECK(huber_occupancy_loss(pred, target, 1.0) == doctest::Approx(0.005).epsilon(1e-12));
    }
    SUBCASE("linear region") {
        for (double& v : pred.values()) v = 2.0;
        CHECK(huber_occupancy_loss(pred, target, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("conservation is the squared sum gap") {
        for (double& v : input.values()) v = 10.0 / 64.0;
        for (double& v : pred.values()) v = 9.0 / 64.0;
        CHECK(conservation_loss(input, pred) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("combined is additive and lambda=0 drops conservation") {
        for (double& v : pred.values()) v = 0.2;
        for (double& v : input.values()) v = 0.7;
        const double h = huber_occupancy_loss(pred, target, 1.0);
        const double c = conservation_loss(input, pred);
        CHECK(combined_loss(input, pred, target, 1.0, 0.1) == doctest::Approx(h + 0.1 * c).epsilon(1e-12));
        CHECK(combined_loss(input, pred, target, 1.0, 0.0) == doctest::Approx(h).epsilon(1e-15));
    }
    SUBCASE("dimension mismatches raise") {
        OccupancyGrid small(GridSpec{0.25, 4, 4, {0, 0}});
        CHECK_THROWS_AS(huber_occupancy_loss(small, target), ValidationError);
        CHECK_THROWS_AS(conservation_loss(small, target), ValidationError);
    }
}

TEST_CASE("linear predictor clamps and loads coefficients") {
    const GridSpec spec{0.25, 16, 16, {0, 0}};
    PredictionInput in;
    in.local_occupancy = OccupancyGrid(spec);
    in.local_occupancy.at(3, 3) = 0.5;
    in.footprint_mask.assign(256, 0);
    in.swath_mask.assign(256, 0);
    in.swath_mask[10] = 1;
    in.window = Window{0, 0, 16, 16};

    LinearPredictor identity;
    CHECK(identity.predict_one(in).values() == in.local_occupancy.values());

    const std::string path = (std::filesystem::temp_directory_path() / "icenav_model.json").string();
    {
        std::ofstream f(path);
        f << "{\"w_occupancy\": 2.0, \"w_swath\": -1.0, \"bias\": 0.25}";
    }
    LinearPredictor loaded = LinearPredictor::load_file(path);
    const OccupancyGrid out = loaded.predict_one(in);
    CHECK(out.at(3, 3) == doctest::Approx(1.0));   // 2*0.5 + 0.25 clamped
    CHECK(out.values()[10] == 0.0);                // swath weight drives below 0, clamped
    CHECK(out.at(0, 0) == doctest::Approx(0.25));  // bias only
    std::filesystem::remove(path);
    CHECK_THROWS_AS(LinearPredictor::load_file(path), ValidationError);
}

TEST_CASE("dataset collection is deterministic and self-consistent") {
    World w = small_world();
    w.window_rows = 40;
    w.window_cols = 48;

    SUBCASE("single entry") {
        std::ostringstream sink;
        CHECK(collect_dataset(w, 0.3, 1, 7, sink) == 1);
        std::istringstream in(sink.str());
        const DatasetFile file = read_dataset(in);
        REQUIRE(file.entries.size() == 1);
        CHECK(file.rows == 40);
        CHECK(file.cols == 48);
        CHECK(file.cell_size == 0.25);
        // Quantized input/target stay ratio-valued.
        for (const double v : file.entries[0].input.local_occupancy.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("same seed twice gives identical byte streams") {
        std::ostringstream a, b;
        collect_dataset(w, 0.4, 40, 99, a);
        collect_dataset(w, 0.4, 40, 99, b);
        CHECK(a.str() == b.str());
        std::ostringstream c;
        collect_dataset(w, 0.4, 40, 100, c);
        CHECK(a.str() != c.str());
    }
    SUBCASE("at 40% concentration most random steps move ice") {
        std::ostringstream sink;
        collect_dataset(w, 0.4, 1000, 3, sink);
        std::istringstream in(sink.str());
        const DatasetFile file = read_dataset(in);
        REQUIRE(file.entries.size() == 1000);
        int moved = 0;
        for (const DatasetEntry& e : file.entries) {
            if (diff_mse(e.input.local_occupancy, e.target) > 0.0) ++moved;
        }
        CHECK(static_cast<double>(moved) / 1000.0 > 0.5);
    }
}
