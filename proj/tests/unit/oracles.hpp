#pragma once

// Independent reference implementations used only to check the library.
// Everything here is written from the definitions, not by calling the code
// under test.

#include <cstdint>
#include <vector>

#include "icenav/geometry.hpp"
#include "icenav/lattice.hpp"
#include "icenav/occupancy.hpp"

namespace icenav::oracles {

bool point_in_polygon(Vec2 p, const Polygon& poly);

/// Monte-Carlo area estimate over the polygon's bounding box.
double monte_carlo_area(const Polygon& poly, std::uint64_t samples, std::uint64_t seed);

/// Direct-formula mean SSIM (Gaussian 11x11, sigma 1.5, C1=0.01^2,
/// C2=0.03^2), nested loops over valid window positions.
double direct_mean_ssim(const OccupancyGrid& a, const OccupancyGrid& b);

/// Optimal 1D transport cost between two nonnegative mass vectors of equal
/// total mass, ground distance |i - j| * cell; greedy two-pointer matching.
double transport_1d(std::vector<double> supply, std::vector<double> demand, double cell);

/// Plain Dijkstra over the lattice graph with edge weight = primitive arc
/// length; returns the shortest distance from start to the goal line.
double dijkstra_distance(const Pose& start, double y_goal, const ControlSet& cs, const ShipShape& shape,
                         const GridSpec& grid);

}  // namespace icenav::oracles
