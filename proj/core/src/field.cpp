#include "icenav/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"
#include "icenav/rng.hpp"

namespace icenav {

double Floe::area() const { return signed_area(vertices); }

double floe_area(const Floe& f) { return f.area(); }

Floe make_floe(int id, Polygon vertices, double density, double thickness) {
    if (vertices.size() < 3) {
        throw ValidationError("floe " + std::to_string(id) + ": needs at least 3 vertices");
    }
    if (!polygon_is_simple(vertices)) {
        throw ValidationError("floe " + std::to_string(id) + ": self-intersecting polygon");
    }
    double a = signed_area(vertices);
    if (a < 0.0) {
        std::reverse(vertices.begin(), vertices.end());
        a = -a;
    }
    if (a <= 0.0) {
        throw ValidationError("floe " + std::to_string(id) + ": zero area");
    }
    if (!polygon_is_convex(vertices)) {
        throw ValidationError("floe " + std::to_string(id) + ": non-convex polygon");
    }
    if (density <= 0.0 || thickness <= 0.0) {
        throw ValidationError("floe " + std::to_string(id) + ": density and thickness must be positive");
    }
    return Floe{id, density, thickness, std::move(vertices)};
}

void validate_channel(const Channel& c) {
    if (c.width <= 0.0 || c.length <= 0.0) {
        throw ValidationError("channel extents must be positive");
    }
    if (!(c.goal_y > 0.0 && c.goal_y <= c.length)) {
        throw ValidationError("goal_y must satisfy 0 < goal_y <= length");
    }
}

namespace {

constexpr double kDisjointTol = 1e-9;  // m^2

void validate_field(const Channel& channel, const std::vector<Floe>& floes) {
    validate_channel(channel);
    for (const Floe& f : floes) {
        for (const Vec2 v : f.vertices) {
            if (v.x < -1e-9 || v.x > channel.width + 1e-9 || v.y < -1e-9 || v.y > channel.length + 1e-9) {
                throw ValidationError("floe " + std::to_string(f.id) + ": vertex outside channel");
            }
        }
    }
    std::vector<Aabb> boxes;
    boxes.reserve(floes.size());
    for (const Floe& f : floes) boxes.push_back(bounding_box(f.vertices));
    for (std::size_t i = 0; i < floes.size(); ++i) {
        for (std::size_t j = i + 1; j < floes.size(); ++j) {
            if (!boxes[i].overlaps(boxes[j])) continue;
            if (convex_overlap_area(floes[i].vertices, floes[j].vertices) >= kDisjointTol) {
                throw ValidationError("floes " + std::to_string(floes[i].id) + " and " +
                                      std::to_string(floes[j].id) + " overlap");
            }
        }
    }
}

}  // namespace

IceField::IceField(Channel channel, std::vector<Floe> floes)
    : channel_(channel), floes_(std::move(floes)) {
    validate_field(channel_, floes_);
}

IceField::IceField(Channel channel, std::vector<Floe> floes, Trusted)
    : channel_(channel), floes_(std::move(floes)) {}

double total_mass(const IceField& field) {
    double m = 0.0;
    for (const Floe& f : field.floes()) m += f.mass();
    return m;
}

double field_concentration(const IceField& field) {
    double a = 0.0;
    for (const Floe& f : field.floes()) a += f.area();
    return a / field.channel().area();
}

namespace {

// Convex ring with the requested vertex count and exact area, centered on its
// centroid.
Polygon random_convex_polygon(Rng& rng, double area, int min_vertices, int max_vertices) {
    constexpr double kTwoPi = 6.283185307179586477;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const int k = min_vertices + static_cast<int>(rng.uniform_int(
                                         static_cast<std::uint64_t>(max_vertices - min_vertices + 1)));
        std::vector<double> angles(k);
        for (double& a : angles) a = rng.uniform(0.0, kTwoPi);
        std::sort(angles.begin(), angles.end());
        bool spread = angles.front() + kTwoPi - angles.back() > 0.2;
        for (int i = 1; i < k && spread; ++i) spread = angles[i] - angles[i - 1] > 0.2;
        if (!spread) continue;

        std::vector<Vec2> pts(k);
        for (int i = 0; i < k; ++i) {
            const double r = rng.uniform(0.7, 1.3);
            pts[i] = {r * std::cos(angles[i]), r * std::sin(angles[i])};
        }
        Polygon hull = convex_hull(pts);
        if (static_cast<int>(hull.size()) != k) continue;

        hull = translated(hull, polygon_centroid(hull) * -1.0);
        const double scale = std::sqrt(area / signed_area(hull));
        for (Vec2& v : hull) v = v * scale;
        return hull;
    }
    throw InfeasibleError("convex polygon sampling failed to converge");
}

bool overlaps_any(const Polygon& cand, const Aabb& cand_box, const std::vector<Floe>& placed,
                  const std::vector<Aabb>& boxes) {
    for (std::size_t i = 0; i < placed.size(); ++i) {
        if (!cand_box.overlaps(boxes[i])) continue;
        if (convex_mtv(placed[i].vertices, cand).has_value()) return true;
    }
    return false;
}

}  // namespace

IceField generate_scenario(double concentration, const Channel& channel, std::uint64_t seed,
                           const ScenarioParams& params) {
    validate_channel(channel);
    if (concentration < 0.0) throw ValidationError("concentration must be non-negative");
    if (concentration > 0.6) {
        throw InfeasibleError("concentration above 0.6 is not reachable by rejection sampling");
    }
    std::vector<Floe> placed;
    if (concentration <= 0.0) return IceField(channel, std::move(placed));

    Rng rng(seed);
    const double target_area = concentration * channel.area();
    const double median = params.median_area_fraction * channel.width * channel.width;
    const double min_area = 0.05 * median;
    const double max_area = 10.0 * median;
    const double log_median = std::log(median);

    // Draw the whole area budget first, then place large floes before small
    // ones; rejection sampling stays feasible well past 50% that way.
    std::vector<double> areas;
    double drawn = 0.0;
    while (target_area - drawn > min_area) {
        double area = std::clamp(rng.lognormal(log_median, params.sigma_log), min_area, max_area);
        if (drawn + area > target_area) area = target_area - drawn;
        areas.push_back(area);
        drawn += area;
    }
    std::sort(areas.begin(), areas.end(), std::greater<double>());

    std::vector<Aabb> boxes;
    int next_id = 0;
    for (const double area : areas) {
        const Polygon shape = random_convex_polygon(rng, area, params.min_vertices, params.max_vertices);
        long rejections = 0;
        for (;;) {
            if (rejections > params.max_rejections) {
                throw InfeasibleError("scenario placement failed after " +
                                      std::to_string(params.max_rejections) + " rejections at concentration " +
                                      std::to_string(concentration));
            }
            const double theta = rng.uniform(0.0, 6.283185307179586477);
            const Polygon rot = rotated(shape, theta);
            const Aabb rb = bounding_box(rot);
            const double x_lo = -rb.lo.x, x_hi = channel.width - rb.hi.x;
            const double y_lo = -rb.lo.y, y_hi = channel.length - rb.hi.y;
            if (x_lo > x_hi || y_lo > y_hi) {
                ++rejections;
                continue;
            }
            const Vec2 pos{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
            Polygon cand = translated(rot, pos);
            const Aabb cand_box = bounding_box(cand);
            if (!overlaps_any(cand, cand_box, placed, boxes)) {
                boxes.push_back(cand_box);
                placed.push_back(Floe{next_id++, params.density, params.thickness, std::move(cand)});
                break;
            }
            ++rejections;
        }
    }
    return IceField(channel, std::move(placed));
}

namespace {

double round_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace

void save_field(const IceField& field, std::ostream& out) {
    nlohmann::json j;
    j["channel"] = {{"width", round_sig9(field.channel().width)},
                    {"length", round_sig9(field.channel().length)},
                    {"goal_y", round_sig9(field.channel().goal_y)}};
    nlohmann::json floes = nlohmann::json::array();
    for (const Floe& f : field.floes()) {
        nlohmann::json verts = nlohmann::json::array();
        for (const Vec2 v : f.vertices) {
            verts.push_back({round_sig9(v.x), round_sig9(v.y)});
        }
        floes.push_back({{"id", f.id},
                         {"density", round_sig9(f.density)},
                         {"thickness", round_sig9(f.thickness)},
                         {"vertices", std::move(verts)}});
    }
    j["floes"] = std::move(floes);
    out << j.dump(2) << '\n';
}

IceField load_field(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("field document is not valid JSON: ") + e.what());
    }
    try {
        Channel c{j.at("channel").at("width").get<double>(), j.at("channel").at("length").get<double>(),
                  j.at("channel").at("goal_y").get<double>()};
        std::vector<Floe> floes;
        for (const auto& jf : j.at("floes")) {
            Polygon verts;
            for (const auto& jv : jf.at("vertices")) {
                verts.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
            }
            floes.push_back(make_floe(jf.at("id").get<int>(), std::move(verts), jf.at("density").get<double>(),
                                      jf.at("thickness").get<double>()));
        }
        return IceField(c, std::move(floes));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("field document missing required keys: ") + e.what());
    }
}

void save_field_file(const IceField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    save_field(field, out);
}

IceField load_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    return load_field(in);
}

}  // namespace icenav
