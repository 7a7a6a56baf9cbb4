#include "icenav/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace icenav {

namespace {

constexpr double kScale = 10.0;  // px per meter

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// SVG y grows downward; the channel +y is up.
double flip_y(double y, double length) { return (length - y) * kScale; }

void polygon_element(std::ostringstream& out, const Polygon& poly, double length, const char* style) {
    out << "<polygon points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (i) out << ' ';
        out << num(poly[i].x * kScale) << ',' << num(flip_y(poly[i].y, length));
    }
    out << "\" " << style << "/>\n";
}

}  // namespace

std::string render_field_svg(const IceField& field, const Path* path, const ControlSet* cs,
                             const ShipShape* ship, const OccupancyGrid* overlay) {
    const Channel& ch = field.channel();
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(ch.width * kScale) << "\" height=\""
        << num(ch.length * kScale) << "\" viewBox=\"0 0 " << num(ch.width * kScale) << ' '
        << num(ch.length * kScale) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(ch.width * kScale) << "\" height=\"" << num(ch.length * kScale)
        << "\" fill=\"#eaf4fb\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    if (overlay != nullptr) {
        const GridSpec& spec = overlay->spec();
        for (int r = 0; r < spec.rows; ++r) {
            for (int c = 0; c < spec.cols; ++c) {
                const double v = overlay->at(r, c);
                if (v < 1e-3) continue;
                const Vec2 lo = spec.cell_lo(r, c);
                out << "<rect x=\"" << num(lo.x * kScale) << "\" y=\""
                    << num(flip_y(lo.y + spec.cell_size, ch.length)) << "\" width=\"" << num(spec.cell_size * kScale)
                    << "\" height=\"" << num(spec.cell_size * kScale) << "\" fill=\"#7a4b12\" fill-opacity=\""
                    << num(std::min(1.0, v)) << "\"/>\n";
            }
        }
    }

    for (const Floe& f : field.floes()) {
        polygon_element(out, f.vertices, ch.length, "fill=\"#cfe3ef\" stroke=\"#4a6a82\" stroke-width=\"0.8\"");
    }

    // Goal line.
    out << "<line x1=\"0\" y1=\"" << num(flip_y(ch.goal_y, ch.length)) << "\" x2=\"" << num(ch.width * kScale)
        << "\" y2=\"" << num(flip_y(ch.goal_y, ch.length)) << "\" stroke=\"#2f7d34\" stroke-width=\"1.5\" "
        << "stroke-dasharray=\"6,4\"/>\n";

    if (path != nullptr && cs != nullptr && !path->primitive_ids.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < path->primitive_ids.size(); ++i) {
            const MotionPrimitive& prim = cs->primitive(path->primitive_ids[i]);
            const Pose& from = path->poses[i];
            for (const PathSample& s : prim.samples) {
                if (!first) out << ' ';
                first = false;
                out << num((from.x + s.pos.x) * kScale) << ',' << num(flip_y(from.y + s.pos.y, ch.length));
            }
        }
        out << "\"/>\n";
        if (ship != nullptr) {
            for (const Pose& p : path->poses) {
                const Polygon hull =
                    ship_polygon_at(*ship, {p.x, p.y}, cs->heading_angle.at(static_cast<std::size_t>(p.heading)));
                polygon_element(out, hull, ch.length,
                                "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.6\" stroke-opacity=\"0.7\"");
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_boxplot_svg(const std::string& title, const std::string& y_label,
                               const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
    const double width = 120.0 + 90.0 * static_cast<double>(groups.size());
    const double height = 320.0;
    const double plot_x0 = 70.0, plot_y0 = 40.0, plot_h = 220.0;

    double lo = 0.0, hi = 1.0;
    bool any = false;
    for (const auto& [label, values] : groups) {
        for (const double v : values) {
            if (!any) {
                lo = hi = v;
                any = true;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any) hi = 1.0;
    if (hi == lo) hi = lo + 1.0;
    const auto y_of = [&](double v) { return plot_y0 + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << num(plot_y0 + plot_h / 2)
        << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 16 " << num(plot_y0 + plot_h / 2)
        << ")\">" << y_label << "</text>\n";
    out << "<line x1=\"" << num(plot_x0) << "\" y1=\"" << num(plot_y0) << "\" x2=\"" << num(plot_x0) << "\" y2=\""
        << num(plot_y0 + plot_h) << "\" stroke=\"#333333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        char lab[40];
        std::snprintf(lab, sizeof lab, "%.3g", v);
        out << "<text x=\"" << num(plot_x0 - 6) << "\" y=\"" << num(y_of(v) + 4)
            << "\" text-anchor=\"end\" font-size=\"10\">" << lab << "</text>\n";
        out << "<line x1=\"" << num(plot_x0 - 4) << "\" y1=\"" << num(y_of(v)) << "\" x2=\"" << num(plot_x0)
            << "\" y2=\"" << num(y_of(v)) << "\" stroke=\"#333333\"/>\n";
    }

    double x = plot_x0 + 50.0;
    for (const auto& [label, values] : groups) {
        std::vector<double> v = values;
        std::sort(v.begin(), v.end());
        if (!v.empty()) {
            const auto q = [&](double p) {
                const double idx = p * static_cast<double>(v.size() - 1);
                const std::size_t i = static_cast<std::size_t>(idx);
                const std::size_t j = std::min(i + 1, v.size() - 1);
                return v[i] * (1.0 - (idx - static_cast<double>(i))) + v[j] * (idx - static_cast<double>(i));
            };
            const double q1 = q(0.25), med = q(0.5), q3 = q(0.75);
            out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y_of(v.front())) << "\" x2=\"" << num(x)
                << "\" y2=\"" << num(y_of(v.back())) << "\" stroke=\"#555555\"/>\n";
            out << "<rect x=\"" << num(x - 18) << "\" y=\"" << num(y_of(q3)) << "\" width=\"36\" height=\""
                << num(std::max(0.5, y_of(q1) - y_of(q3))) << "\" fill=\"#9ecbe3\" stroke=\"#333333\"/>\n";
            out << "<line x1=\"" << num(x - 18) << "\" y1=\"" << num(y_of(med)) << "\" x2=\"" << num(x + 18)
                << "\" y2=\"" << num(y_of(med)) << "\" stroke=\"#b03030\" stroke-width=\"1.5\"/>\n";
        }
        out << "<text x=\"" << num(x) << "\" y=\"" << num(plot_y0 + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << label << "</text>\n";
        x += 90.0;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace icenav
