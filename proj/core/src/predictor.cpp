#include "icenav/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "icenav/errors.hpp"
#include "icenav/rng.hpp"

namespace icenav {

OccupancyGrid Predictor::predict_one(const PredictionInput& input) {
    return predict(std::span<const PredictionInput>(&input, 1)).front();
}

namespace {

std::vector<std::uint8_t> cells_to_mask(const CellSet& cells, const Window& w, const char* what) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w.rows) * w.cols, 0);
    for (const GridCell& cell : cells) {
        const int r = cell.r - w.row0;
        const int c = cell.c - w.col0;
        if (r < 0 || r >= w.rows || c < 0 || c >= w.cols) {
            throw ValidationError(std::string("window too small: ") + what +
                                  " extends outside the prediction window");
        }
        mask[static_cast<std::size_t>(r) * w.cols + c] = 1;
    }
    return mask;
}

PredictionInput finish_input(OccupancyGrid local, Window w, const Pose& pose, int prim_id, const CellSet& fp,
                             const CellSet& sw) {
    PredictionInput in;
    in.footprint_mask = cells_to_mask(fp, w, "footprint");
    in.swath_mask = cells_to_mask(sw, w, "swath");
    in.local_occupancy = std::move(local);
    in.window = w;
    in.provenance.pose = pose;
    in.provenance.primitive_id = prim_id;
    return in;
}

}  // namespace

PredictionInput assemble_input(const OccupancyGrid& global, const Pose& pose, const MotionPrimitive& prim,
                               const ControlSet& cs, const ShipShape& shape, int window_rows, int window_cols) {
    auto [local, w] = crop(global, Vec2{pose.x, pose.y}, window_rows, window_cols);
    return finish_input(std::move(local), w, pose, prim.id, footprint_cells(pose, cs, shape, global.spec()),
                        swath_cells(pose, prim, cs, shape, global.spec()));
}

PredictionInput assemble_input(const OccupancyGrid& global, const Pose& pose, const MotionPrimitive& prim,
                               const SwathAtlas& atlas, int window_rows, int window_cols) {
    auto [local, w] = crop(global, Vec2{pose.x, pose.y}, window_rows, window_cols);
    return finish_input(std::move(local), w, pose, prim.id, atlas.footprint(pose), atlas.swath(pose, prim.id));
}

PredictionInput assemble_input_from_field(const IceField& field, const GridSpec& grid, const Pose& pose,
                                          const MotionPrimitive& prim, const ControlSet& cs,
                                          const ShipShape& shape, int window_rows, int window_cols) {
    const Window w = window_at(grid, Vec2{pose.x, pose.y}, window_rows, window_cols);
    return finish_input(rasterize_window(field, grid, w), w, pose, prim.id,
                        footprint_cells(pose, cs, shape, grid), swath_cells(pose, prim, cs, shape, grid));
}

PredictionInput assemble_input_from_field(const IceField& field, const GridSpec& grid, const Pose& pose,
                                          const MotionPrimitive& prim, const SwathAtlas& atlas,
                                          int window_rows, int window_cols) {
    const Window w = window_at(grid, Vec2{pose.x, pose.y}, window_rows, window_cols);
    return finish_input(rasterize_window(field, grid, w), w, pose, prim.id, atlas.footprint(pose),
                        atlas.swath(pose, prim.id));
}

OccupancyGrid rollout_predict(const PredictionInput& input, const IceField& field, const Pose& pose,
                              const MotionPrimitive& prim, const ShipShape& shape, const GridSpec& global_spec,
                              const DynamicsParams& params, double consistency_tol) {
    const OccupancyGrid truth = rasterize_window(field, global_spec, input.window);
    for (std::size_t i = 0; i < truth.values().size(); ++i) {
        if (std::abs(truth.values()[i] - input.local_occupancy.values()[i]) > consistency_tol) {
            throw ValidationError("rollout_predict: field is inconsistent with the input occupancy layer");
        }
    }
    const StepResult step = step_primitive(field, pose, prim, shape, params);
    return rasterize_window(step.field_after, global_spec, input.window);
}

RolloutPredictor::RolloutPredictor(IceField root_field, const ControlSet& cs, ShipShape shape,
                                   GridSpec global_spec, DynamicsParams params)
    : root_(std::move(root_field)), cs_(cs), shape_(std::move(shape)), spec_(global_spec), params_(params) {}

std::vector<RolloutPredictor::MovedFloe> RolloutPredictor::delta_from_root(const IceField& field) const {
    std::vector<MovedFloe> delta;
    for (std::size_t i = 0; i < field.floes().size(); ++i) {
        // Floes only translate; an untouched floe keeps its exact vertices.
        if (field.floes()[i].vertices[0] == root_.floes()[i].vertices[0]) continue;
        delta.push_back({i, field.floes()[i].vertices});
    }
    return delta;
}

IceField RolloutPredictor::resolve(const std::optional<EdgeRef>& incoming) const {
    if (!incoming) return root_;
    const EdgeKey key{pose_key(cs_, incoming->pose), incoming->primitive_id};
    std::vector<MovedFloe> delta;
    {
        std::lock_guard<std::mutex> lock(mu_);
        const auto it = deltas_.find(key);
        if (it == deltas_.end()) {
            throw ValidationError("rollout predictor: unknown incoming edge in prediction provenance");
        }
        delta = it->second;
    }
    std::vector<Floe> floes = root_.floes();
    for (const MovedFloe& m : delta) floes[m.index].vertices = m.poly;
    return IceField(root_.channel(), std::move(floes), IceField::Trusted{});
}

std::vector<OccupancyGrid> RolloutPredictor::predict(std::span<const PredictionInput> batch) {
    std::vector<OccupancyGrid> out;
    out.reserve(batch.size());
    for (const PredictionInput& input : batch) {
        const IceField field = resolve(input.provenance.incoming);
        const MotionPrimitive& prim = cs_.primitive(input.provenance.primitive_id);
        StepResult step = step_primitive(field, input.provenance.pose, prim, shape_, params_);
        {
            std::lock_guard<std::mutex> lock(mu_);
            deltas_[EdgeKey{pose_key(cs_, input.provenance.pose), prim.id}] = delta_from_root(step.field_after);
        }
        out.push_back(rasterize_window(step.field_after, spec_, input.window));
    }
    return out;
}

IceField RolloutPredictor::field_after(const EdgeRef& edge) const {
    return resolve(std::optional<EdgeRef>(edge));
}

LinearPredictor::LinearPredictor(double w_occupancy, double w_footprint, double w_swath, double bias)
    : w_occ_(w_occupancy), w_fp_(w_footprint), w_sw_(w_swath), bias_(bias) {}

LinearPredictor LinearPredictor::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("model file is not valid JSON: " + std::string(e.what()));
    }
    return LinearPredictor(j.value("w_occupancy", 1.0), j.value("w_footprint", 0.0), j.value("w_swath", 0.0),
                           j.value("bias", 0.0));
}

std::vector<OccupancyGrid> LinearPredictor::predict(std::span<const PredictionInput> batch) {
    std::vector<OccupancyGrid> out;
    out.reserve(batch.size());
    for (const PredictionInput& input : batch) {
        OccupancyGrid g = input.local_occupancy;
        for (std::size_t i = 0; i < g.values().size(); ++i) {
            const double v = w_occ_ * g.values()[i] + w_fp_ * input.footprint_mask[i] +
                             w_sw_ * input.swath_mask[i] + bias_;
            g.values()[i] = std::clamp(v, 0.0, 1.0);
        }
        out.push_back(std::move(g));
    }
    return out;
}

double huber_occupancy_loss(const OccupancyGrid& predicted, const OccupancyGrid& target, double delta) {
    if (!predicted.same_dims(target)) throw ValidationError("huber_occupancy_loss: grid dimensions differ");
    if (delta <= 0.0) throw ValidationError("huber_occupancy_loss: delta must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.values().size(); ++i) {
        const double e = std::abs(predicted.values()[i] - target.values()[i]);
        s += e <= delta ? 0.5 * e * e : delta * (e - 0.5 * delta);
    }
    return s / static_cast<double>(predicted.values().size());
}

double conservation_loss(const OccupancyGrid& input_occ, const OccupancyGrid& predicted) {
    if (!input_occ.same_dims(predicted)) throw ValidationError("conservation_loss: grid dimensions differ");
    const double d = grid_sum(input_occ) - grid_sum(predicted);
    return d * d;
}

double combined_loss(const OccupancyGrid& input_occ, const OccupancyGrid& predicted,
                     const OccupancyGrid& target, double delta, double lambda) {
    if (lambda < 0.0) throw ValidationError("combined_loss: lambda must be non-negative");
    return huber_occupancy_loss(predicted, target, delta) + lambda * conservation_loss(input_occ, predicted);
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_grid_u16(std::ostream& out, const OccupancyGrid& g) {
    for (const double v : g.values()) {
        put_u16(out, static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0)));
    }
}

void write_bits(std::ostream& out, const std::vector<std::uint8_t>& mask) {
    unsigned char byte = 0;
    int fill = 0;
    for (const std::uint8_t m : mask) {
        if (m) byte |= static_cast<unsigned char>(1u << fill);
        if (++fill == 8) {
            out.put(static_cast<char>(byte));
            byte = 0;
            fill = 0;
        }
    }
    if (fill != 0) out.put(static_cast<char>(byte));
}

constexpr char kDatasetMagic[8] = {'I', 'C', 'E', 'N', 'A', 'V', 'D', '1'};

}  // namespace

DatasetWriter::DatasetWriter(std::ostream& out, int rows, int cols, double cell_size)
    : out_(out), rows_(rows), cols_(cols) {
    out_.write(kDatasetMagic, 8);
    put_u32(out_, 1);
    put_u32(out_, static_cast<std::uint32_t>(rows));
    put_u32(out_, static_cast<std::uint32_t>(cols));
    put_f64(out_, cell_size);
    if (!out_) throw ValidationError("dataset sink write failed");
}

void DatasetWriter::write(const PredictionInput& input, const OccupancyGrid& target) {
    if (input.local_occupancy.rows() != rows_ || input.local_occupancy.cols() != cols_ ||
        !input.local_occupancy.same_dims(target)) {
        throw ValidationError("dataset entry dimensions do not match the stream header");
    }
    write_grid_u16(out_, input.local_occupancy);
    write_bits(out_, input.footprint_mask);
    write_bits(out_, input.swath_mask);
    write_grid_u16(out_, target);
    if (!out_) throw ValidationError("dataset sink write failed");
    ++count_;
}

DatasetFile read_dataset(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kDatasetMagic, 8) != 0) {
        throw ValidationError("not an icenav dataset stream");
    }
    const std::uint32_t version = get_u32(in);
    if (version != 1) throw ValidationError("unsupported dataset version " + std::to_string(version));
    DatasetFile file;
    file.rows = static_cast<int>(get_u32(in));
    file.cols = static_cast<int>(get_u32(in));
    file.cell_size = get_f64(in);
    const std::size_t n = static_cast<std::size_t>(file.rows) * file.cols;
    const std::size_t nbytes = (n + 7) / 8;
    const GridSpec spec{file.cell_size, file.rows, file.cols, Vec2{0.0, 0.0}};

    const auto read_grid = [&](OccupancyGrid& g) {
        g = OccupancyGrid(spec);
        for (double& v : g.values()) v = static_cast<double>(get_u16(in)) / 65535.0;
    };
    const auto read_bits = [&](std::vector<std::uint8_t>& mask) {
        mask.assign(n, 0);
        std::vector<unsigned char> buf(nbytes);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes));
        for (std::size_t i = 0; i < n; ++i) mask[i] = (buf[i / 8] >> (i % 8)) & 1u;
    };

    for (in.peek(); !in.eof(); in.peek()) {
        DatasetEntry e;
        read_grid(e.input.local_occupancy);
        read_bits(e.input.footprint_mask);
        read_bits(e.input.swath_mask);
        read_grid(e.target);
        if (!in) throw ValidationError("truncated dataset entry");
        e.input.window = Window{0, 0, file.rows, file.cols};
        file.entries.push_back(std::move(e));
    }
    return file;
}

std::uint64_t collect_dataset(const World& world, double concentration, std::uint64_t n_entries,
                              std::uint64_t seed, std::ostream& sink) {
    if (n_entries < 1) throw ValidationError("collect_dataset: n_entries must be at least 1");
    IceField field = generate_scenario(concentration, world.channel, seed);
    Pose pose = world.start;
    Rng rng(seed ^ 0xd1b54a32d192ed03ull);
    DatasetWriter writer(sink, world.window_rows, world.window_cols, world.grid.cell_size);
    const SwathAtlas atlas(world.control_set, world.ship, world.grid);

    while (writer.count() < n_entries) {
        const std::vector<int> feasible = feasible_primitives(pose, world.control_set, world.ship, world.grid);
        if (feasible.empty() || pose.y >= world.channel.goal_y) {
            pose = world.start;
            continue;
        }
        const MotionPrimitive& prim =
            world.control_set.primitive(feasible[rng.uniform_int(feasible.size())]);
        const PredictionInput input = assemble_input_from_field(field, world.grid, pose, prim, atlas,
                                                                world.window_rows, world.window_cols);
        StepResult step = step_primitive(field, pose, prim, world.ship, world.dynamics);
        const OccupancyGrid target = rasterize_window(step.field_after, world.grid, input.window);
        writer.write(input, target);
        field = std::move(step.field_after);
        pose = apply_primitive(world.control_set, pose, prim);
    }
    return writer.count();
}

}  // namespace icenav
