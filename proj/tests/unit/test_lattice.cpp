#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "icenav/errors.hpp"
#include "icenav/lattice.hpp"
#include "icenav/world.hpp"

using namespace icenav;

namespace {

// Independent endpoint integration: walk the analytic segments.
Vec2 integrate_endpoint(const MotionPrimitive& prim) {
    Vec2 p{0.0, 0.0};
    for (const PrimitiveSegment& seg : prim.segments) {
        if (seg.curvature == 0.0) {
            p += Vec2{seg.length * std::cos(seg.theta0), seg.length * std::sin(seg.theta0)};
        } else {
            const double th1 = seg.theta0 + seg.curvature * seg.length;
            p += Vec2{(std::sin(th1) - std::sin(seg.theta0)) / seg.curvature,
                      (std::cos(seg.theta0) - std::cos(th1)) / seg.curvature};
        }
    }
    return p;
}

}  // namespace

TEST_CASE("control set generation, 16 headings") {
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    CHECK(cs.n_headings == 16);
    REQUIRE(cs.heading_dir.size() == 16);

    SUBCASE("every forward heading has primitives, backward headings none") {
        for (int h = 0; h < 16; ++h) {
            const bool forward = cs.heading_dir[static_cast<std::size_t>(h)].y >= 0.0;
            CHECK(cs.by_heading[static_cast<std::size_t>(h)].empty() == !forward);
        }
    }
    SUBCASE("every primitive ends exactly on a lattice state and moves forward") {
        for (const MotionPrimitive& p : cs.primitives) {
            const Vec2 end = integrate_endpoint(p);
            CHECK(std::abs(end.x - p.displacement.x) < 1e-9);
            CHECK(std::abs(end.y - p.displacement.y) < 1e-9);
            CHECK(p.diy >= 1);
            CHECK(p.arc_length >= cs.l_min);
            CHECK(p.samples.front().pos == Vec2{0.0, 0.0});
            CHECK(p.samples.back().pos == p.displacement);
            // Arc radii respect the turn radius.
            for (const PrimitiveSegment& seg : p.segments) {
                if (seg.curvature != 0.0) CHECK(1.0 / std::abs(seg.curvature) >= 2.5 - 1e-9);
            }
        }
    }
    SUBCASE("straight +y primitive") {
        int up = -1;
        for (int h = 0; h < 16; ++h) {
            if (cs.heading_dir[static_cast<std::size_t>(h)] == Vec2{0.0, 1.0}) up = h;
        }
        REQUIRE(up >= 0);
        bool found = false;
        for (const int pid : cs.by_heading[static_cast<std::size_t>(up)]) {
            const MotionPrimitive& p = cs.primitive(pid);
            if (p.end_heading == up) {
                found = true;
                CHECK(p.displacement.x == 0.0);
                CHECK(p.displacement.y == 1.0);
                CHECK(p.arc_length == 1.0);
            }
        }
        CHECK(found);
    }
    SUBCASE("l_min equals the lattice spacing, by enumeration") {
        double shortest = 1e300;
        for (const MotionPrimitive& p : cs.primitives) shortest = std::min(shortest, p.arc_length);
        CHECK(shortest == cs.l_min);
        CHECK(cs.l_min == 1.0);
    }
}

TEST_CASE("control set generation, 8 headings and error paths") {
    const ControlSet cs = generate_control_set(2.0, 8, 4.0);
    CHECK(cs.l_min == 2.0);
    for (const MotionPrimitive& p : cs.primitives) {
        const Vec2 end = integrate_endpoint(p);
        CHECK(std::abs(end.x - p.displacement.x) < 1e-9);
        CHECK(std::abs(end.y - p.displacement.y) < 1e-9);
    }
    CHECK_THROWS_AS(generate_control_set(1.0, 12, 2.5), ValidationError);
    CHECK_THROWS_AS(generate_control_set(1.0, 16, 0.5), ValidationError);
    // A turn radius too wide for the admissible primitive length cannot land
    // on the lattice.
    CHECK_THROWS_AS(generate_control_set(1.0, 16, 40.0), InfeasibleError);
}

TEST_CASE("footprint cells") {
    const GridSpec spec{0.25, 64, 48, {0, 0}};
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    const int up = 4;

    SUBCASE("tiny ship centered in a cell occupies exactly that cell") {
        const ShipShape dot = make_ship({{-0.05, -0.05}, {0.05, -0.05}, {0.05, 0.05}, {-0.05, 0.05}});
        const CellSet cells = footprint_cells(Pose{3.125, 4.125, up}, cs, dot, spec);
        REQUIRE(cells.size() == 1);
        CHECK(cells[0] == GridCell{16, 12});
    }
    SUBCASE("translation by one cell translates the footprint") {
        const ShipShape ship = default_ship();
        const CellSet base = footprint_cells(Pose{6.0, 8.0, up}, cs, ship, spec);
        const CellSet moved = footprint_cells(Pose{6.0 + 0.25, 8.0 + 0.5, up}, cs, ship, spec);
        REQUIRE(base.size() == moved.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(moved[i].r == base[i].r + 2);
            CHECK(moved[i].c == base[i].c + 1);
        }
    }
    SUBCASE("180-degree rotation of a symmetric shape keeps the cell set") {
        const ShipShape rect = make_ship({{-0.5, -1.0}, {0.5, -1.0}, {0.5, 1.0}, {-0.5, 1.0}});
        const CellSet a = footprint_cells(Pose{6.0, 8.0, 4}, cs, rect, spec);
        const CellSet b = footprint_cells(Pose{6.0, 8.0, 12}, cs, rect, spec);  // heading (0,-1)
        CHECK(a == b);
    }
    SUBCASE("footprint is nonempty for any in-grid pose") {
        const ShipShape ship = default_ship();
        for (int h = 0; h < 9; ++h) {
            CHECK_FALSE(footprint_cells(Pose{6.0, 8.0, h}, cs, ship, spec).empty());
        }
    }
}

TEST_CASE("swath cells") {
    const GridSpec spec{0.25, 96, 48, {0, 0}};
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    const ShipShape ship = default_ship();
    const int up = 4;
    const Pose pose{6.0, 8.0, up};

    SUBCASE("swath contains the start footprint and is at least as large") {
        for (const int pid : cs.by_heading[up]) {
            const MotionPrimitive& prim = cs.primitive(pid);
            const CellSet fp = footprint_cells(pose, cs, ship, spec);
            const CellSet sw = swath_cells(pose, prim, cs, ship, spec);
            CHECK(sw.size() >= fp.size());
            CHECK(std::includes(sw.begin(), sw.end(), fp.begin(), fp.end()));
            // End footprint too.
            const Pose end = apply_primitive(cs, pose, prim);
            const CellSet fp_end = footprint_cells(end, cs, ship, spec);
            CHECK(std::includes(sw.begin(), sw.end(), fp_end.begin(), fp_end.end()));
        }
    }
    SUBCASE("lattice translation shifts the swath cell set identically") {
        for (const int pid : cs.by_heading[up]) {
            const MotionPrimitive& prim = cs.primitive(pid);
            const CellSet base = swath_cells(pose, prim, cs, ship, spec);
            const CellSet moved = swath_cells(Pose{7.0, 10.0, up}, prim, cs, ship, spec);
            REQUIRE(base.size() == moved.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                CHECK(moved[i].r == base[i].r + 8);
                CHECK(moved[i].c == base[i].c + 4);
            }
        }
    }
    SUBCASE("heading mismatch is rejected") {
        const int pid = cs.by_heading[5].front();
        CHECK_THROWS_AS(swath_cells(pose, cs.primitive(pid), cs, ship, spec), ValidationError);
    }
}

TEST_CASE("swath atlas matches direct clipping on lattice poses") {
    const GridSpec spec{0.25, 96, 48, {0, 0}};
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    const ShipShape ship = default_ship();
    const SwathAtlas atlas(cs, ship, spec);
    for (const Pose pose : {Pose{6.0, 8.0, 4}, Pose{3.0, 3.0, 2}, Pose{9.0, 15.0, 6}, Pose{1.0, 2.0, 5}}) {
        CHECK(atlas.footprint(pose) == footprint_cells(pose, cs, ship, spec));
        for (const int pid : cs.by_heading[static_cast<std::size_t>(pose.heading)]) {
            CHECK(atlas.swath(pose, pid) == swath_cells(pose, cs.primitive(pid), cs, ship, spec));
        }
    }
    // Off-lattice poses fall back to direct clipping.
    const Pose frac{6.1, 8.2, 4};
    CHECK(atlas.footprint(frac) == footprint_cells(frac, cs, ship, spec));
}

TEST_CASE("concat_path") {
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    const int up = 4;
    int straight = -1;
    for (const int pid : cs.by_heading[up]) {
        if (cs.primitive(pid).end_heading == up) straight = pid;
    }
    REQUIRE(straight >= 0);

    SUBCASE("empty path") {
        const Path p = concat_path(cs, {}, Pose{6.0, 2.0, up});
        CHECK(p.length == 0.0);
        CHECK(p.poses.size() == 1);
    }
    SUBCASE("two straights") {
        const Path p = concat_path(cs, {straight, straight}, Pose{6.0, 2.0, up});
        CHECK(p.length == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(p.poses.back().y == doctest::Approx(4.0));
    }
    SUBCASE("path length dominates forward progress") {
        // Chain straight, left turn, then whatever continues from there.
        const int left = cs.by_heading[up].front();
        const Path p = concat_path(cs, {straight, left}, Pose{6.0, 2.0, up});
        CHECK(p.length >= p.poses.back().y - p.start.y - 1e-12);
    }
    SUBCASE("broken chain names the joint") {
        const int turn = [&] {
            for (const int pid : cs.by_heading[up]) {
                if (cs.primitive(pid).end_heading != up) return pid;
            }
            return -1;
        }();
        REQUIRE(turn >= 0);
        CHECK_THROWS_WITH_AS(concat_path(cs, {turn, turn}, Pose{6.0, 2.0, up}),
                             doctest::Contains("joint 1"), ValidationError);
    }
}

TEST_CASE("control set JSON export") {
    const ControlSet cs = generate_control_set(1.0, 16, 2.5);
    std::ostringstream out;
    save_control_set(cs, out);
    CHECK(out.str().find("\"primitives\"") != std::string::npos);
    CHECK(out.str().find("\"l_min\"") != std::string::npos);
}
