#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "icenav/errors.hpp"
#include "icenav/occupancy.hpp"
#include "icenav/rng.hpp"
#include "oracles.hpp"

using namespace icenav;

namespace {

OccupancyGrid random_grid(const GridSpec& spec, Rng& rng) {
    OccupancyGrid g(spec);
    for (double& v : g.values()) v = rng.uniform();
    return g;
}

}  // namespace

TEST_CASE("grid_for_channel covers the channel exactly") {
    const GridSpec spec = grid_for_channel(Channel{12.0, 40.0, 32.0}, 0.25);
    CHECK(spec.rows == 160);
    CHECK(spec.cols == 48);
    CHECK_THROWS_AS(grid_for_channel(Channel{12.1, 40.0, 32.0}, 0.25), ValidationError);
}

TEST_CASE("rasterize exact cases") {
    const Channel ch{1.0, 1.0, 1.0};
    const GridSpec spec = grid_for_channel(ch, 0.25);

    SUBCASE("empty field is all zeros") {
        const OccupancyGrid g = rasterize(IceField(ch, {}), spec);
        for (const double v : g.values()) CHECK(v == 0.0);
    }
    SUBCASE("floe coinciding with one cell") {
        const IceField f(ch, {make_floe(0, {{0.25, 0.25}, {0.5, 0.25}, {0.5, 0.5}, {0.25, 0.5}}, 900, 0.01)});
        const OccupancyGrid g = rasterize(f, spec);
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                CHECK(g.at(r, c) == (r == 1 && c == 1 ? 1.0 : 0.0));
            }
        }
    }
    SUBCASE("floe covering the left half of a cell") {
        const IceField f(ch, {make_floe(0, {{0.25, 0.25}, {0.375, 0.25}, {0.375, 0.5}, {0.25, 0.5}}, 900, 0.01)});
        const OccupancyGrid g = rasterize(f, spec);
        CHECK(std::abs(g.at(1, 1) - 0.5) <= 1e-6);
        const double mc = oracles::monte_carlo_area(f.floes()[0].vertices, 1000000, 3);
        CHECK(std::abs(mc / spec.cell_area() - g.at(1, 1)) < 0.01);
    }
}

TEST_CASE("rasterization conserves total floe area") {
    const Channel ch{6.0, 8.0, 8.0};
    const GridSpec spec = grid_for_channel(ch, 0.25);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const IceField f = generate_scenario(0.3, ch, seed);
        double area = 0.0;
        for (const Floe& floe : f.floes()) area += floe.area();
        const double mass_in_grid = grid_sum(rasterize(f, spec)) * spec.cell_area();
        CHECK(std::abs(mass_in_grid - area) <= 1e-6 * area);
    }
}

TEST_CASE("grid_sum basics") {
    const GridSpec spec{0.25, 8, 8, {0, 0}};
    OccupancyGrid g(spec);
    CHECK(grid_sum(g) == 0.0);
    g.at(3, 4) = 1.0;
    CHECK(grid_sum(g) == 1.0);
}

TEST_CASE("crop and stitch") {
    const GridSpec spec{0.25, 64, 32, {0, 0}};
    Rng rng(5);
    const OccupancyGrid global = random_grid(spec, rng);

    SUBCASE("full-extent crop is the identity with anchor (0,0)") {
        const auto [local, w] = crop(global, Vec2{4.0, 8.0}, 64, 32);
        CHECK(w == Window{0, 0, 64, 32});
        CHECK(local.values() == global.values());
    }
    SUBCASE("windows are clamped at boundaries and keep full extent") {
        const Window w = window_at(spec, Vec2{0.1, 0.1}, 16, 16);
        CHECK(w.row0 == 0);
        CHECK(w.col0 == 0);
        const Window w2 = window_at(spec, Vec2{7.9, 15.9}, 16, 16);
        CHECK(w2.row0 == 64 - 16);
        CHECK(w2.col0 == 32 - 16);
    }
    SUBCASE("crop/stitch roundtrip is bit-exact for 1000 random poses") {
        for (int i = 0; i < 1000; ++i) {
            const Vec2 pos{rng.uniform(0.0, 8.0), rng.uniform(0.0, 16.0)};
            const auto [local, w] = crop(global, pos, 16, 12);
            const OccupancyGrid back = stitch(global, local, w);
            CHECK(back.values() == global.values());
        }
    }
    SUBCASE("stitch replaces exactly the window") {
        OccupancyGrid zeros(spec);
        OccupancyGrid ones(GridSpec{0.25, 4, 4, {0, 0}});
        for (double& v : ones.values()) v = 1.0;
        const OccupancyGrid out = stitch(zeros, ones, Window{2, 3, 4, 4});
        CHECK(grid_sum(out) == 16.0);
        CHECK(out.at(2, 3) == 1.0);
        CHECK(out.at(1, 3) == 0.0);
    }
    SUBCASE("stitch dimension mismatch raises") {
        OccupancyGrid local(GridSpec{0.25, 4, 4, {0, 0}});
        CHECK_THROWS_AS(stitch(global, local, Window{0, 0, 5, 4}), ValidationError);
        CHECK_THROWS_AS(stitch(global, local, Window{62, 0, 4, 4}), ValidationError);
    }
}

TEST_CASE("diff_mse") {
    const GridSpec spec{0.25, 16, 16, {0, 0}};
    Rng rng(17);
    const OccupancyGrid a = random_grid(spec, rng);
    const OccupancyGrid b = random_grid(spec, rng);

    CHECK(diff_mse(a, a) == 0.0);
    OccupancyGrid ones(spec), zeros(spec);
    for (double& v : ones.values()) v = 1.0;
    CHECK(diff_mse(ones, zeros) == 1.0);

    OccupancyGrid one_cell = zeros;
    one_cell.at(7, 9) = 1.0;
    CHECK(diff_mse(one_cell, zeros) == doctest::Approx(1.0 / 256.0).epsilon(1e-15));

    CHECK(diff_mse(a, b) == diff_mse(b, a));
    CHECK(diff_mse(a, b) >= 0.0);
    CHECK(diff_mse(a, b) <= 1.0);
    CHECK_THROWS_AS(diff_mse(a, OccupancyGrid(GridSpec{0.25, 8, 8, {0, 0}})), ValidationError);
}

TEST_CASE("diff_neg_ssim") {
    const GridSpec spec{0.25, 24, 24, {0, 0}};
    Rng rng(23);
    const OccupancyGrid a = random_grid(spec, rng);
    const OccupancyGrid b = random_grid(spec, rng);

    SUBCASE("identical grids give exactly -1") {
        CHECK(diff_neg_ssim(a, a) == -1.0);
    }
    SUBCASE("checkerboard against its inverse stays above -1") {
        OccupancyGrid cb(spec), inv(spec);
        for (int r = 0; r < 24; ++r) {
            for (int c = 0; c < 24; ++c) {
                cb.at(r, c) = (r + c) % 2 ? 1.0 : 0.0;
                inv.at(r, c) = (r + c) % 2 ? 0.0 : 1.0;
            }
        }
        const double v = diff_neg_ssim(cb, inv);
        CHECK(v > -1.0);
        CHECK(v <= 1.0);
    }
    SUBCASE("matches the direct-formula implementation") {
        CHECK(std::abs(diff_neg_ssim(a, b) - (-oracles::direct_mean_ssim(a, b))) <= 1e-9);
        CHECK(std::abs(diff_neg_ssim(a, a) - (-oracles::direct_mean_ssim(a, a))) <= 1e-9);
    }
    SUBCASE("symmetry") {
        CHECK(diff_neg_ssim(a, b) == doctest::Approx(diff_neg_ssim(b, a)).epsilon(1e-12));
    }
    SUBCASE("grids smaller than the window are rejected") {
        OccupancyGrid small(GridSpec{0.25, 8, 8, {0, 0}});
        CHECK_THROWS_AS(diff_neg_ssim(small, small), ValidationError);
    }
}

TEST_CASE("diff_emd") {
    const GridSpec spec{0.5, 6, 6, {0, 0}};
    OccupancyGrid zero(spec);

    SUBCASE("identity") {
        Rng rng(31);
        const OccupancyGrid a = random_grid(spec, rng);
        CHECK(diff_emd(a, a) == 0.0);
    }
    SUBCASE("unit mass shifted k columns costs k * cell_size") {
        OccupancyGrid a(spec), b(spec);
        a.at(0, 0) = 1.0;
        b.at(0, 4) = 1.0;
        CHECK(diff_emd(a, b) == doctest::Approx(4 * 0.5).epsilon(1e-12));
    }
    SUBCASE("matches greedy optimal transport on marginals for random 4x4 grids") {
        const GridSpec small{0.25, 4, 4, {0, 0}};
        Rng rng(37);
        for (int t = 0; t < 50; ++t) {
            const OccupancyGrid a = random_grid(small, rng);
            const OccupancyGrid b = random_grid(small, rng);
            std::vector<double> ra(4, 0.0), rb(4, 0.0), ca(4, 0.0), cb(4, 0.0);
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) {
                    ra[r] += a.at(r, c);
                    rb[r] += b.at(r, c);
                    ca[c] += a.at(r, c);
                    cb[c] += b.at(r, c);
                }
            }
            const double expected =
                oracles::transport_1d(ra, rb, 0.25) + oracles::transport_1d(ca, cb, 0.25);
            CHECK(diff_emd(a, b) == doctest::Approx(expected).epsilon(1e-10));
            CHECK(diff_emd(a, b) == doctest::Approx(diff_emd(b, a)).epsilon(1e-12));
        }
    }
    SUBCASE("all-zero fallback scales the sum difference by the diagonal") {
        OccupancyGrid b(spec);
        b.at(2, 2) = 0.5;
        const double diag = 0.5 * std::hypot(6.0, 6.0);
        CHECK(diff_emd(zero, b) == doctest::Approx(0.5 * diag).epsilon(1e-12));
        CHECK(diff_emd(zero, zero) == 0.0);
    }
}

TEST_CASE("pgm16 and csv export") {
    const Channel ch{2.0, 2.0, 2.0};
    const GridSpec spec = grid_for_channel(ch, 0.25);
    const IceField f(ch, {make_floe(0, {{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.25}, {0.5, 1.25}}, 900, 0.01)});
    const OccupancyGrid g = rasterize(f, spec);

    const std::string path = (std::filesystem::temp_directory_path() / "icenav_test_grid.pgm").string();
    save_pgm16(g, path);
    const OccupancyGrid back = load_pgm16(path);
    REQUIRE(back.same_dims(g));
    for (std::size_t i = 0; i < g.values().size(); ++i) {
        CHECK(std::abs(back.values()[i] - g.values()[i]) <= 0.5 / 65535.0 + 1e-12);
    }
    std::ostringstream csv;
    save_grid_csv(g, csv);
    CHECK(csv.str().find(',') != std::string::npos);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".json");
}
