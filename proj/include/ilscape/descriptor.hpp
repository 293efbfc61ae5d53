#pragma once

#include <array>
#include <string>
#include <vector>

#include "ilscape/flowfield.hpp"

namespace ilscape {

// Distance-weighted histogram of one attribute inside one sensor.
// bins are normalized to unit sum when the sensor is active for the
// attribute; raw_bins keep the unnormalized accumulation for debugging.
struct LocalHistogram {
    int attribute = 0;
    int sensor_id = -1;
    double sensor_size = 0.0;
    int occupied_cells = 0; // cells that tracked at least one sample
    bool active = false;    // occupied and with nonzero accumulated mass
    std::vector<double> bins;
    std::vector<double> raw_bins;
};

// The global signature of one encoded interaction: one histogram per
// attribute plus everything needed to decide comparability.
struct InteractionDescriptor {
    int version = 1;
    int bins = 16;
    int resolution = 8;
    NormMode norm_mode = NormMode::Average;
    std::array<double, kAttributeCount> scales{};
    int active_sensors = 0;
    std::string label;
    std::array<std::vector<double>, kAttributeCount> hist;
};

struct AttributeWeights {
    // Order: Mt, Md, Ms, Mw, M, O. Dilation and orientation carry the
    // most signal, shear and raw magnitude the least.
    std::array<double, kAttributeCount> w{0.75, 1.0, 0.25, 0.75, 0.25, 1.0};
};

// Scale each raw attribute into [0,1] before binning (value/scale,
// clamped). Calibrated on the synthetic presets at default settings:
// the median tensor values sit below half range while cells at the edge
// of the tracked region (whose gradients blow up as velocity over cell
// size) clamp into the top bin. Magnitude covers speeds up to ~4;
// orientation is already in [0,1].
constexpr std::array<double, kAttributeCount> kDefaultScales{
    64.0, 64.0, 64.0, 32.0, 4.0, 1.0};

// Accumulate occupied cells of one attribute grid into N bins.
// Each occupied cell adds t * exp(-(dist/r)^2) / N to bin floor(t*N),
// where t = clamp(value/scale, 0, 1) (t = 1 goes to the last bin) and
// dist is from the cell center to its closest surface point. The result
// is then renormalized to unit sum.
LocalHistogram local_histogram(const AttributeGrids& grids, int attribute,
                               const VectorField& field, const Sensor& sensor,
                               const SurfaceCache& cache, int num_bins,
                               double scale);

// Volume-weighted mean of the given local histograms: bin k becomes
// sum_j(m_jk * r_j^3) / sum_j(r_j^3) over active locals. Exposed
// separately from aggregate() so the pre-normalization values are
// testable.
std::vector<double> volume_weighted_bins(
    const std::vector<LocalHistogram>& locals);

// Combine per-sensor local histograms (6 lists, one per attribute, same
// sensors in each) into the global descriptor. Only sensors that tracked
// particles count as active; an attribute with no active sensor at all
// collapses to a unit spike in bin 0 (every cell value was zero).
InteractionDescriptor aggregate(
    const std::array<std::vector<LocalHistogram>, kAttributeCount>& locals,
    int num_bins, int resolution, NormMode norm_mode,
    const std::array<double, kAttributeCount>& scales,
    const std::string& label = "");

enum class BhattVariant {
    Coefficient, // sqrt(1 - BC), bounded to [0,1]
    Log,         // -ln(BC), unbounded
};

BhattVariant parse_bhatt_variant(const std::string& name);

// Bhattacharyya distance between two unit-sum histograms of equal size.
double bhattacharyya(const std::vector<double>& h,
                     const std::vector<double>& k,
                     BhattVariant variant = BhattVariant::Coefficient);

// Weighted mean of per-attribute histogram distances, divided by the
// attribute count (not the weight sum). Requires matching metadata.
double distance(const InteractionDescriptor& a, const InteractionDescriptor& b,
                const AttributeWeights& weights = {},
                BhattVariant variant = BhattVariant::Coefficient);

// Structured text persistence (.ild). Load rejects unknown versions and
// reports malformed content with its byte offset.
void save_descriptor(const std::string& path,
                     const InteractionDescriptor& d);
InteractionDescriptor load_descriptor(const std::string& path);

// In-memory forms of the same format (used by save/load and the tests).
std::string descriptor_to_text(const InteractionDescriptor& d);
InteractionDescriptor descriptor_from_text(const std::string& text);

} // namespace ilscape
