#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "icenav/geometry.hpp"

namespace icenav {

/// Rigid convex ice piece with uniform density and thickness. Vertices are
/// counter-clockwise in the channel frame (meters).
struct Floe {
    int id = 0;
    double density = 900.0;    // kg/m^3
    double thickness = 0.012;  // m
    Polygon vertices;

    double area() const;
    double mass() const { return area() * density * thickness; }
    Vec2 centroid() const { return polygon_centroid(vertices); }
};

/// Validates ring shape (>= 3 vertices, simple, nonzero area) and normalizes
/// the winding to counter-clockwise. Throws ValidationError.
Floe make_floe(int id, Polygon vertices, double density, double thickness);

struct Channel {
    double width = 12.0;   // x extent, meters
    double length = 76.0;  // y extent, meters
    double goal_y = 70.0;

    double area() const { return width * length; }
};

/// Throws ValidationError unless 0 < goal_y <= length and both extents positive.
void validate_channel(const Channel& c);

class IceField {
public:
    /// Validating constructor: every vertex inside the channel, pairwise floe
    /// interiors disjoint (overlap area < 1e-9 m^2).
    IceField(Channel channel, std::vector<Floe> floes);

    /// For simulator outputs, which stay inside the channel by construction
    /// and may carry a tolerated residual overlap after a jam.
    struct Trusted {};
    IceField(Channel channel, std::vector<Floe> floes, Trusted);

    const Channel& channel() const { return channel_; }
    const std::vector<Floe>& floes() const { return floes_; }

private:
    Channel channel_;
    std::vector<Floe> floes_;
};

double floe_area(const Floe& f);

double total_mass(const IceField& field);

struct ScenarioParams {
    double median_area_fraction = 0.01;  // median floe area as a fraction of width^2
    double sigma_log = 0.55;             // log-normal shape
    int min_vertices = 5;
    int max_vertices = 9;
    double density = 900.0;
    double thickness = 0.012;
    double concentration_tolerance = 0.02;
    long max_rejections = 100000;
};

/// Random field at the target concentration (total floe area / channel area
/// within the tolerance). Deterministic per (concentration, channel, seed).
/// Throws InfeasibleError when concentration > 0.6 or placement stalls.
IceField generate_scenario(double concentration, const Channel& channel, std::uint64_t seed,
                           const ScenarioParams& params = {});

/// Achieved concentration of a field.
double field_concentration(const IceField& field);

/// JSON document with channel dims and per-floe vertex arrays. Coordinates
/// are written with 9 significant digits; save(load(save(f))) is
/// byte-identical to save(f).
void save_field(const IceField& field, std::ostream& out);
IceField load_field(std::istream& in);
void save_field_file(const IceField& field, const std::string& path);
IceField load_field_file(const std::string& path);

}  // namespace icenav
