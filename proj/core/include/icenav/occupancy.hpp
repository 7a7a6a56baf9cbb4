#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "icenav/field.hpp"
#include "icenav/geometry.hpp"

namespace icenav {

struct GridSpec {
    double cell_size = 0.25;  // meters per cell side
    int rows = 0;             // along +y
    int cols = 0;             // along +x
    Vec2 origin;              // world coordinate of the (0,0) cell corner

    double cell_area() const { return cell_size * cell_size; }
    Vec2 cell_lo(int r, int c) const {
        return {origin.x + c * cell_size, origin.y + r * cell_size};
    }
    Vec2 cell_hi(int r, int c) const {
        return {origin.x + (c + 1) * cell_size, origin.y + (r + 1) * cell_size};
    }
    int row_of(double y) const;
    int col_of(double x) const;
    bool operator==(const GridSpec&) const = default;
};

/// Grid spec covering the channel exactly; channel walls coincide with grid
/// edges. Throws ValidationError if the extents are not near-multiples of the
/// cell size.
GridSpec grid_for_channel(const Channel& channel, double cell_size);

/// Per-cell occupied-area ratios in [0, 1].
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    explicit OccupancyGrid(const GridSpec& spec) : spec_(spec), v_(static_cast<std::size_t>(spec.rows) * spec.cols, 0.0) {}

    const GridSpec& spec() const { return spec_; }
    int rows() const { return spec_.rows; }
    int cols() const { return spec_.cols; }
    double at(int r, int c) const { return v_[static_cast<std::size_t>(r) * spec_.cols + c]; }
    double& at(int r, int c) { return v_[static_cast<std::size_t>(r) * spec_.cols + c]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    bool same_dims(const OccupancyGrid& o) const { return spec_.rows == o.spec_.rows && spec_.cols == o.spec_.cols; }

private:
    GridSpec spec_;
    std::vector<double> v_;
};

/// Rectangular region of a global grid: anchor cell plus extent.
struct Window {
    int row0 = 0;
    int col0 = 0;
    int rows = 0;
    int cols = 0;
    bool operator==(const Window&) const = default;
};

/// Exact polygon-cell clipping: each cell holds (cell ∩ union of floes)/s_g^2.
/// Overlapping floes accumulate and the cell is clamped at 1.
OccupancyGrid rasterize(const IceField& field, const GridSpec& spec);

/// Rasterization restricted to a window of the global grid. Cell (r, c) of
/// the result is bit-identical to cell (row0+r, col0+c) of rasterize(field,
/// spec).
OccupancyGrid rasterize_window(const IceField& field, const GridSpec& spec, const Window& w);

/// Window placement: laterally centered on the ship cell, a quarter of the
/// extent behind it and the rest ahead (+y), clamped inside the grid.
Window window_at(const GridSpec& spec, Vec2 ship_pos, int rows, int cols);

std::pair<OccupancyGrid, Window> crop(const OccupancyGrid& global, Vec2 ship_pos, int rows, int cols);

/// Copy of the window region as a stand-alone grid (origin shifted to the
/// window corner).
OccupancyGrid crop(const OccupancyGrid& global, const Window& w);

/// New global grid with the window region replaced by `local`.
OccupancyGrid stitch(const OccupancyGrid& global, const OccupancyGrid& local, const Window& w);

double grid_sum(const OccupancyGrid& g);

/// Mean squared per-cell difference; in [0, 1] for ratio grids.
double diff_mse(const OccupancyGrid& a, const OccupancyGrid& b);

/// Negated mean structural similarity, Gaussian 11x11 window (sigma 1.5),
/// C1 = 0.01^2 and C2 = 0.03^2 at dynamic range 1. Identical grids give -1.
double diff_neg_ssim(const OccupancyGrid& a, const OccupancyGrid& b);

/// Approximate earth-mover distance: Wasserstein-1 between mass-normalized
/// row marginals plus column marginals, in meters. When either grid carries
/// no mass, falls back to |sum difference| scaled by the grid diagonal.
double diff_emd(const OccupancyGrid& a, const OccupancyGrid& b);

/// 16-bit PGM (P5, big-endian samples), value = round(ratio * 65535), plus a
/// JSON sidecar (same path + ".json") holding the GridSpec.
void save_pgm16(const OccupancyGrid& g, const std::string& path);
OccupancyGrid load_pgm16(const std::string& path);

void save_grid_csv(const OccupancyGrid& g, std::ostream& out);

}  // namespace icenav
