#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "icenav/rng.hpp"
#include "icenav/world.hpp"

namespace icenav::oracles {

bool point_in_polygon(Vec2 p, const Polygon& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            if (p.x < a.x + t * (b.x - a.x)) inside = !inside;
        }
    }
    return inside;
}

double monte_carlo_area(const Polygon& poly, std::uint64_t samples, std::uint64_t seed) {
    const Aabb bb = bounding_box(poly);
    Rng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Vec2 p{rng.uniform(bb.lo.x, bb.hi.x), rng.uniform(bb.lo.y, bb.hi.y)};
        if (point_in_polygon(p, poly)) ++hits;
    }
    const double box_area = (bb.hi.x - bb.lo.x) * (bb.hi.y - bb.lo.y);
    return box_area * static_cast<double>(hits) / static_cast<double>(samples);
}

double direct_mean_ssim(const OccupancyGrid& a, const OccupancyGrid& b) {
    constexpr int kW = 11;
    const double sigma = 1.5;
    double w2d[kW][kW];
    double wsum = 0.0;
    for (int i = 0; i < kW; ++i) {
        for (int j = 0; j < kW; ++j) {
            const double di = i - (kW - 1) / 2;
            const double dj = j - (kW - 1) / 2;
            w2d[i][j] = std::exp(-0.5 * (di * di + dj * dj) / (sigma * sigma));
            wsum += w2d[i][j];
        }
    }
    for (int i = 0; i < kW; ++i) {
        for (int j = 0; j < kW; ++j) w2d[i][j] /= wsum;
    }

    const int rows = a.rows(), cols = a.cols();
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    long count = 0;
    for (int r = 0; r + kW <= rows; ++r) {
        for (int c = 0; c + kW <= cols; ++c) {
            double mu1 = 0.0, mu2 = 0.0;
            for (int i = 0; i < kW; ++i) {
                for (int j = 0; j < kW; ++j) {
                    mu1 += w2d[i][j] * a.at(r + i, c + j);
                    mu2 += w2d[i][j] * b.at(r + i, c + j);
                }
            }
            double v1 = 0.0, v2 = 0.0, cov = 0.0;
            for (int i = 0; i < kW; ++i) {
                for (int j = 0; j < kW; ++j) {
                    const double da = a.at(r + i, c + j) - mu1;
                    const double db = b.at(r + i, c + j) - mu2;
                    v1 += w2d[i][j] * da * da;
                    v2 += w2d[i][j] * db * db;
                    cov += w2d[i][j] * da * db;
                }
            }
            total += ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) / ((mu1 * mu1 + mu2 * mu2 + c1) * (v1 + v2 + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double transport_1d(std::vector<double> supply, std::vector<double> demand, double cell) {
    const double s = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double d = std::accumulate(demand.begin(), demand.end(), 0.0);
    for (double& v : supply) v /= s;
    for (double& v : demand) v /= d;
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    while (i < supply.size() && j < demand.size()) {
        if (supply[i] <= 1e-18) {
            ++i;
            continue;
        }
        if (demand[j] <= 1e-18) {
            ++j;
            continue;
        }
        const double moved = std::min(supply[i], demand[j]);
        cost += moved * std::abs(static_cast<double>(i) - static_cast<double>(j)) * cell;
        supply[i] -= moved;
        demand[j] -= moved;
    }
    return cost;
}

double dijkstra_distance(const Pose& start, double y_goal, const ControlSet& cs, const ShipShape& shape,
                         const GridSpec& grid) {
    struct Entry {
        double d;
        long seq;
        Pose pose;
    };
    const auto worse = [](const Entry& a, const Entry& b) {
        if (a.d != b.d) return a.d > b.d;
        return a.seq > b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
    std::map<std::tuple<long, long, int>, double> dist;
    const auto key = [&](const Pose& p) {
        return std::make_tuple(std::lround(p.x / cs.spacing), std::lround(p.y / cs.spacing), p.heading);
    };
    long seq = 0;
    open.push({0.0, seq++, start});
    dist[key(start)] = 0.0;
    std::set<std::tuple<long, long, int>> done;
    while (!open.empty()) {
        const Entry e = open.top();
        open.pop();
        const auto k = key(e.pose);
        if (done.count(k)) continue;
        if (e.d > dist[k]) continue;
        if (e.pose.y >= y_goal) return e.d;
        done.insert(k);
        for (const int pid : cs.by_heading.at(static_cast<std::size_t>(e.pose.heading))) {
            const MotionPrimitive& prim = cs.primitive(pid);
            if (!primitive_feasible(e.pose, prim, cs, shape, grid)) continue;
            const Pose next = apply_primitive(cs, e.pose, prim);
            const double nd = e.d + prim.arc_length;
            const auto nk = key(next);
            const auto it = dist.find(nk);
            if (it == dist.end() || nd < it->second) {
                dist[nk] = nd;
                open.push({nd, seq++, next});
            }
        }
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace icenav::oracles
