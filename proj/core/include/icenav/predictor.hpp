#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "icenav/world.hpp"

namespace icenav {

/// Identity of a search edge: the pose of the expanded node plus the
/// primitive taken from it.
struct EdgeRef {
    Pose pose;
    int primitive_id = -1;
};

/// Where a prediction request comes from. Image-only predictors ignore it;
/// the physics-rollout predictor uses it to resolve the exact floe field at
/// the expanded node (`incoming` names the accepted edge that created the
/// node; empty at the search root).
struct Provenance {
    Pose pose;
    int primitive_id = -1;
    std::optional<EdgeRef> incoming;
};

/// The three spatially-aligned layers of one prediction request: fractional
/// local occupancy plus binary footprint and swath masks.
struct PredictionInput {
    OccupancyGrid local_occupancy;
    std::vector<std::uint8_t> footprint_mask;  // row-major, 0/1
    std::vector<std::uint8_t> swath_mask;
    Window window;
    Provenance provenance;
};

struct DatasetEntry {
    PredictionInput input;
    OccupancyGrid target;
};

/// One-step occupancy prediction contract. Implementations must be safe for
/// concurrent use and must clamp outputs to [0, 1] at the input dimensions.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::vector<OccupancyGrid> predict(std::span<const PredictionInput> batch) = 0;
    OccupancyGrid predict_one(const PredictionInput& input);
};

/// Crops the local occupancy around the pose and rasterizes footprint and
/// swath into window-aligned masks. Throws ValidationError when the swath
/// does not fit inside the window.
PredictionInput assemble_input(const OccupancyGrid& global, const Pose& pose, const MotionPrimitive& prim,
                               const ControlSet& cs, const ShipShape& shape, int window_rows, int window_cols);

/// Atlas-backed variant for hot loops; produces the same layers.
PredictionInput assemble_input(const OccupancyGrid& global, const Pose& pose, const MotionPrimitive& prim,
                               const SwathAtlas& atlas, int window_rows, int window_cols);

/// Same layers built straight from the ground-truth field (the input
/// occupancy layer is the exact window rasterization).
PredictionInput assemble_input_from_field(const IceField& field, const GridSpec& grid, const Pose& pose,
                                          const MotionPrimitive& prim, const ControlSet& cs,
                                          const ShipShape& shape, int window_rows, int window_cols);

PredictionInput assemble_input_from_field(const IceField& field, const GridSpec& grid, const Pose& pose,
                                          const MotionPrimitive& prim, const SwathAtlas& atlas,
                                          int window_rows, int window_cols);

/// Ground-truth one-step prediction: step_primitive, rasterize, crop to the
/// window. Requires the field to be consistent with the input occupancy
/// layer (max per-cell deviation <= consistency_tol); throws ValidationError
/// otherwise.
OccupancyGrid rollout_predict(const PredictionInput& input, const IceField& field, const Pose& pose,
                              const MotionPrimitive& prim, const ShipShape& shape, const GridSpec& global_spec,
                              const DynamicsParams& params = {}, double consistency_tol = 1e-6);

/// Perfect predictor backed by the pushing simulator. Tracks the exact floe
/// field per predicted edge so sequential predictions along any search branch
/// reproduce ground truth. The control set must outlive the predictor.
class RolloutPredictor final : public Predictor {
public:
    RolloutPredictor(IceField root_field, const ControlSet& cs, ShipShape shape, GridSpec global_spec,
                     DynamicsParams params = {});

    std::vector<OccupancyGrid> predict(std::span<const PredictionInput> batch) override;

    /// Ground-truth field after a previously predicted edge.
    IceField field_after(const EdgeRef& edge) const;

private:
    struct EdgeKey {
        PoseKey node;
        int prim;
        bool operator==(const EdgeKey&) const = default;
    };
    struct EdgeKeyHash {
        std::size_t operator()(const EdgeKey& k) const {
            return PoseKeyHash{}(k.node) * 1000003u + static_cast<std::size_t>(k.prim + 1);
        }
    };
    struct MovedFloe {
        std::size_t index;
        Polygon poly;
    };

    IceField resolve(const std::optional<EdgeRef>& incoming) const;
    std::vector<MovedFloe> delta_from_root(const IceField& field) const;

    IceField root_;
    const ControlSet& cs_;
    ShipShape shape_;
    GridSpec spec_;
    DynamicsParams params_;
    mutable std::mutex mu_;
    std::unordered_map<EdgeKey, std::vector<MovedFloe>, EdgeKeyHash> deltas_;
};

/// Affine per-cell model loaded from a JSON coefficient file:
/// out = clamp(w_occupancy*O + w_footprint*F + w_swath*T + bias).
/// Default-constructed, it is the identity on the occupancy layer.
class LinearPredictor final : public Predictor {
public:
    LinearPredictor() = default;
    LinearPredictor(double w_occupancy, double w_footprint, double w_swath, double bias);
    static LinearPredictor load_file(const std::string& path);

    std::vector<OccupancyGrid> predict(std::span<const PredictionInput> batch) override;

private:
    double w_occ_ = 1.0;
    double w_fp_ = 0.0;
    double w_sw_ = 0.0;
    double bias_ = 0.0;
};

/// Mean per-cell Huber loss between prediction and target.
double huber_occupancy_loss(const OccupancyGrid& predicted, const OccupancyGrid& target, double delta = 1.0);

/// Squared difference of grid sums between the input occupancy and the
/// prediction.
double conservation_loss(const OccupancyGrid& input_occ, const OccupancyGrid& predicted);

double combined_loss(const OccupancyGrid& input_occ, const OccupancyGrid& predicted,
                     const OccupancyGrid& target, double delta = 1.0, double lambda = 0.1);

/// Fixed-layout little-endian dataset stream. Header: "ICENAVD1", u32
/// version, u32 rows, u32 cols, f64 cell_size. Per entry: occupancy as u16
/// ratios, footprint and swath as LSB-first packed bits, target as u16.
class DatasetWriter {
public:
    DatasetWriter(std::ostream& out, int rows, int cols, double cell_size);
    void write(const PredictionInput& input, const OccupancyGrid& target);
    std::uint64_t count() const { return count_; }

private:
    std::ostream& out_;
    int rows_;
    int cols_;
    std::uint64_t count_ = 0;
};

struct DatasetFile {
    int rows = 0;
    int cols = 0;
    double cell_size = 0.0;
    std::vector<DatasetEntry> entries;
};
DatasetFile read_dataset(std::istream& in);

/// Random-policy ground-truth collection: sample a uniformly random feasible
/// primitive, record (O, F, T, O') and execute it; the ship resets to the
/// start pose on crossing the goal line while the field keeps evolving.
/// Returns the entry count (= n_entries).
std::uint64_t collect_dataset(const World& world, double concentration, std::uint64_t n_entries,
                              std::uint64_t seed, std::ostream& sink);

}  // namespace icenav
