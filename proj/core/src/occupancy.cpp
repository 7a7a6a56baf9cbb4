#include "icenav/occupancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"

namespace icenav {

int GridSpec::row_of(double y) const {
    const int r = static_cast<int>(std::floor((y - origin.y) / cell_size));
    return std::clamp(r, 0, rows - 1);
}

int GridSpec::col_of(double x) const {
    const int c = static_cast<int>(std::floor((x - origin.x) / cell_size));
    return std::clamp(c, 0, cols - 1);
}

GridSpec grid_for_channel(const Channel& channel, double cell_size) {
    if (cell_size <= 0.0) throw ValidationError("cell_size must be positive");
    const double rows_f = channel.length / cell_size;
    const double cols_f = channel.width / cell_size;
    const int rows = static_cast<int>(std::lround(rows_f));
    const int cols = static_cast<int>(std::lround(cols_f));
    if (std::abs(rows * cell_size - channel.length) > 1e-9 || std::abs(cols * cell_size - channel.width) > 1e-9) {
        throw ValidationError("channel extents must be multiples of the cell size");
    }
    return GridSpec{cell_size, rows, cols, Vec2{0.0, 0.0}};
}

namespace {

void check_window(const GridSpec& spec, const Window& w) {
    if (w.rows <= 0 || w.cols <= 0 || w.row0 < 0 || w.col0 < 0 || w.row0 + w.rows > spec.rows ||
        w.col0 + w.cols > spec.cols) {
        throw ValidationError("window does not fit inside the grid");
    }
}

// Adds every floe's clipped per-cell area into `out`, restricted to window
// cells. Cell rectangles are always computed from global indices so windowed
// and full rasterization agree bit-for-bit.
void accumulate_field(const IceField& field, const GridSpec& spec, const Window& w, OccupancyGrid& out) {
    const double inv_area = 1.0 / spec.cell_area();
    for (const Floe& f : field.floes()) {
        const Aabb bb = bounding_box(f.vertices);
        int r0 = static_cast<int>(std::floor((bb.lo.y - spec.origin.y) / spec.cell_size));
        int r1 = static_cast<int>(std::floor((bb.hi.y - spec.origin.y) / spec.cell_size));
        int c0 = static_cast<int>(std::floor((bb.lo.x - spec.origin.x) / spec.cell_size));
        int c1 = static_cast<int>(std::floor((bb.hi.x - spec.origin.x) / spec.cell_size));
        r0 = std::max(r0, w.row0);
        c0 = std::max(c0, w.col0);
        r1 = std::min(r1, w.row0 + w.rows - 1);
        c1 = std::min(c1, w.col0 + w.cols - 1);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                const double a = rect_overlap_area(f.vertices, spec.cell_lo(r, c), spec.cell_hi(r, c));
                if (a != 0.0) out.at(r - w.row0, c - w.col0) += a * inv_area;
            }
        }
    }
    for (double& v : out.values()) v = std::min(v, 1.0);
}

}  // namespace

OccupancyGrid rasterize(const IceField& field, const GridSpec& spec) {
    OccupancyGrid g(spec);
    accumulate_field(field, spec, Window{0, 0, spec.rows, spec.cols}, g);
    return g;
}

OccupancyGrid rasterize_window(const IceField& field, const GridSpec& spec, const Window& w) {
    check_window(spec, w);
    GridSpec local{spec.cell_size, w.rows, w.cols, spec.cell_lo(w.row0, w.col0)};
    OccupancyGrid g(local);
    accumulate_field(field, spec, w, g);
    return g;
}

Window window_at(const GridSpec& spec, Vec2 ship_pos, int rows, int cols) {
    if (rows > spec.rows || cols > spec.cols) {
        throw ValidationError("window extent exceeds grid dimensions");
    }
    const int ship_r = spec.row_of(ship_pos.y);
    const int ship_c = spec.col_of(ship_pos.x);
    const int row0 = std::clamp(ship_r - rows / 4, 0, spec.rows - rows);
    const int col0 = std::clamp(ship_c - cols / 2, 0, spec.cols - cols);
    return Window{row0, col0, rows, cols};
}

OccupancyGrid crop(const OccupancyGrid& global, const Window& w) {
    check_window(global.spec(), w);
    GridSpec local{global.spec().cell_size, w.rows, w.cols, global.spec().cell_lo(w.row0, w.col0)};
    OccupancyGrid out(local);
    for (int r = 0; r < w.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            out.at(r, c) = global.at(w.row0 + r, w.col0 + c);
        }
    }
    return out;
}

std::pair<OccupancyGrid, Window> crop(const OccupancyGrid& global, Vec2 ship_pos, int rows, int cols) {
    const Window w = window_at(global.spec(), ship_pos, rows, cols);
    return {crop(global, w), w};
}

OccupancyGrid stitch(const OccupancyGrid& global, const OccupancyGrid& local, const Window& w) {
    check_window(global.spec(), w);
    if (local.rows() != w.rows || local.cols() != w.cols) {
        throw ValidationError("stitch: local grid dimensions do not match the window extent");
    }
    OccupancyGrid out = global;
    for (int r = 0; r < w.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            out.at(w.row0 + r, w.col0 + c) = local.at(r, c);
        }
    }
    return out;
}

double grid_sum(const OccupancyGrid& g) {
    double s = 0.0;
    for (const double v : g.values()) s += v;
    return s;
}

namespace {

void check_same_dims(const OccupancyGrid& a, const OccupancyGrid& b, const char* op) {
    if (!a.same_dims(b)) throw ValidationError(std::string(op) + ": grid dimensions differ");
}

}  // namespace

double diff_mse(const OccupancyGrid& a, const OccupancyGrid& b) {
    check_same_dims(a, b, "diff_mse");
    const std::vector<double>& va = a.values();
    const std::vector<double>& vb = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double d = va[i] - vb[i];
        s += d * d;
    }
    return s / static_cast<double>(va.size());
}

namespace {

constexpr int kSsimWindow = 11;

std::array<double, kSsimWindow> ssim_kernel() {
    std::array<double, kSsimWindow> k{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - (kSsimWindow - 1) / 2;
        k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable valid-mode convolution with the 1D kernel in both directions.
std::vector<double> gaussian_valid(const std::vector<double>& img, int rows, int cols) {
    const auto k = ssim_kernel();
    const int oc = cols - kSsimWindow + 1;
    const int orr = rows - kSsimWindow + 1;
    std::vector<double> horiz(static_cast<std::size_t>(rows) * oc);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < oc; ++c) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) s += k[i] * img[static_cast<std::size_t>(r) * cols + c + i];
            horiz[static_cast<std::size_t>(r) * oc + c] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(orr) * oc);
    for (int r = 0; r < orr; ++r) {
        for (int c = 0; c < oc; ++c) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) s += k[i] * horiz[static_cast<std::size_t>(r + i) * oc + c];
            out[static_cast<std::size_t>(r) * oc + c] = s;
        }
    }
    return out;
}

}  // namespace

double diff_neg_ssim(const OccupancyGrid& a, const OccupancyGrid& b) {
    check_same_dims(a, b, "diff_neg_ssim");
    const int rows = a.rows(), cols = a.cols();
    if (rows < kSsimWindow || cols < kSsimWindow) {
        throw ValidationError("diff_neg_ssim: grid smaller than the 11x11 SSIM window");
    }
    const std::vector<double>& va = a.values();
    const std::vector<double>& vb = b.values();
    const std::size_t n = va.size();
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = va[i] * va[i];
        bb[i] = vb[i] * vb[i];
        ab[i] = va[i] * vb[i];
    }
    const std::vector<double> mu1 = gaussian_valid(va, rows, cols);
    const std::vector<double> mu2 = gaussian_valid(vb, rows, cols);
    const std::vector<double> m11 = gaussian_valid(aa, rows, cols);
    const std::vector<double> m22 = gaussian_valid(bb, rows, cols);
    const std::vector<double> m12 = gaussian_valid(ab, rows, cols);

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    double total = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        const double s1 = m11[i] - mu1[i] * mu1[i];
        const double s2 = m22[i] - mu2[i] * mu2[i];
        const double s12 = m12[i] - mu1[i] * mu2[i];
        const double num = (2.0 * mu1[i] * mu2[i] + c1) * (2.0 * s12 + c2);
        const double den = (mu1[i] * mu1[i] + mu2[i] * mu2[i] + c1) * (s1 + s2 + c2);
        total += num / den;
    }
    return -(total / static_cast<double>(mu1.size()));
}

double diff_emd(const OccupancyGrid& a, const OccupancyGrid& b) {
    check_same_dims(a, b, "diff_emd");
    const double sa = grid_sum(a);
    const double sb = grid_sum(b);
    const double cell = a.spec().cell_size;
    if (sa <= 0.0 || sb <= 0.0) {
        const double diag = cell * std::hypot(static_cast<double>(a.rows()), static_cast<double>(a.cols()));
        return std::abs(sa - sb) * diag;
    }
    const int rows = a.rows(), cols = a.cols();
    double out = 0.0;
    double cum = 0.0;
    for (int r = 0; r + 1 < rows; ++r) {
        double ra = 0.0, rb = 0.0;
        for (int c = 0; c < cols; ++c) {
            ra += a.at(r, c);
            rb += b.at(r, c);
        }
        cum += ra / sa - rb / sb;
        out += std::abs(cum) * cell;
    }
    cum = 0.0;
    for (int c = 0; c + 1 < cols; ++c) {
        double ca = 0.0, cb = 0.0;
        for (int r = 0; r < rows; ++r) {
            ca += a.at(r, c);
            cb += b.at(r, c);
        }
        cum += ca / sa - cb / sb;
        out += std::abs(cum) * cell;
    }
    return out;
}

void save_pgm16(const OccupancyGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "P5\n" << g.cols() << ' ' << g.rows() << "\n65535\n";
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(g.at(r, c), 0.0, 1.0) * 65535.0));
            const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    }
    nlohmann::json meta = {{"cell_size", g.spec().cell_size},
                           {"rows", g.rows()},
                           {"cols", g.cols()},
                           {"origin", {g.spec().origin.x, g.spec().origin.y}}};
    std::ofstream side(path + ".json", std::ios::binary);
    if (!side) throw ValidationError("cannot open for writing: " + path + ".json");
    side << meta.dump(2) << '\n';
}

OccupancyGrid load_pgm16(const std::string& path) {
    std::ifstream side(path + ".json", std::ios::binary);
    if (!side) throw ValidationError("missing grid sidecar: " + path + ".json");
    nlohmann::json meta;
    side >> meta;
    GridSpec spec{meta.at("cell_size").get<double>(), meta.at("rows").get<int>(), meta.at("cols").get<int>(),
                  Vec2{meta.at("origin").at(0).get<double>(), meta.at("origin").at(1).get<double>()}};

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    std::string magic;
    int cols = 0, rows = 0, maxval = 0;
    in >> magic >> cols >> rows >> maxval;
    if (magic != "P5" || maxval != 65535 || cols != spec.cols || rows != spec.rows) {
        throw ValidationError("not a 16-bit PGM matching its sidecar: " + path);
    }
    in.get();  // single whitespace after maxval
    OccupancyGrid g(spec);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            unsigned char bytes[2];
            in.read(reinterpret_cast<char*>(bytes), 2);
            if (!in) throw ValidationError("truncated PGM: " + path);
            g.at(r, c) = static_cast<double>((bytes[0] << 8) | bytes[1]) / 65535.0;
        }
    }
    return g;
}

void save_grid_csv(const OccupancyGrid& g, std::ostream& out) {
    char buf[40];
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", g.at(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace icenav
