#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ilscape/aabb_tree.hpp"
#include "ilscape/analysis.hpp"
#include "ilscape/descriptor.hpp"
#include "ilscape/flowfield.hpp"
#include "ilscape/mesh.hpp"
#include "ilscape/sampling.hpp"
#include "ilscape/sensor_grid.hpp"
#include "ilscape/trajectory.hpp"

namespace ilscape {

// Everything one encoding run needs, read from an INI-style file:
// top-level keys drive the pipeline, [synth] describes generated motion,
// [scales] and [weights] override per-attribute values by name. Unknown
// keys and sections are rejected; within a key the last assignment wins
// so command-line overrides can reuse the same setter path.
struct SceneConfig {
    std::string mesh_path;
    std::string trajectory_path; // exclusive with [synth]
    bool use_synth = false;
    SynthPreset preset = SynthPreset::Translate;
    SynthParams synth; // dt here is ignored; the top-level dt governs
    std::string label;

    double domain_size = 0.0; // <= 0 picks the padded mesh extent
    int up_axis = 2;
    double spacing = 0.1;
    int max_depth = 8;
    double dt = 0.025;
    int resolution = 8;
    NormMode norm_mode = NormMode::Average;
    int bins = 16;
    std::array<double, kAttributeCount> scales = kDefaultScales;
    AttributeWeights weights;
    uint64_t seed = 1;
};

// `origin` names the text in error messages (a path, usually).
SceneConfig scene_config_from_text(const std::string& text,
                                   const std::string& origin = "scene config");
SceneConfig load_scene_config(const std::string& path);

// Range checks shared by the parser and flag overrides.
void validate_scene_config(const SceneConfig& config);

// Attribute weights as `name = value` lines (Mt Md Ms Mw M O), each
// optional; omitted attributes keep their default weight.
AttributeWeights load_weights(const std::string& path);

// Per-scene state shared by every time window of the same scene: the
// mesh with its closest-point tree, the surface samples, the sensor
// tree, and the complete trajectory set.
struct PreparedScene {
    SceneConfig config;
    Mesh mesh;
    AabbTree surface;
    SurfaceSampleSet samples;
    SensorTree tree;
    TrajectorySet trajectories;
};

PreparedScene prepare_scene(const SceneConfig& config);

struct EncodeStats {
    size_t window_samples = 0; // trajectory samples in the time window
    size_t binned_samples = 0; // of those, inside the sensor space
    int surface_samples = 0;
    int sensor_count = 0;
    int active_sensors = 0;
    double seconds = 0.0;
};

struct EncodeResult {
    InteractionDescriptor descriptor;
    SensorFieldSet fields; // active sensors only, ascending id
    EncodeStats stats;
};

constexpr double kOpenWindow = std::numeric_limits<double>::quiet_NaN();

// Encode the window [t0, t1] of a prepared scene; NaN leaves that end
// open. A fully open window skips clipping entirely, so re-encoding the
// whole scene is bit-stable. Fails when no sensor tracks a sample.
EncodeResult encode_prepared(const PreparedScene& scene,
                             double t0 = kOpenWindow,
                             double t1 = kOpenWindow);

EncodeResult encode_scene(const SceneConfig& config);

// Cumulative prefix windows ending at k/n of the observed span, k=1..n.
// The last window reuses the uncut trajectory set, so segment n equals
// the full descriptor bit for bit. A window that captured nothing yields
// an inactive all-zero descriptor of the same layout instead of failing.
std::vector<InteractionDescriptor> segment_signatures(
    const PreparedScene& scene, int n_seg);

// One line of a descriptor database manifest. `file` is stored relative
// to the manifest; `segments` counts the sidecar files <stem>.segK.ild.
struct ManifestRow {
    int id = -1;
    int segments = 0;
    std::string file;
    std::string label;
};

// Descriptor files directly inside `dir` (segment sidecars excluded),
// sorted by name, ids assigned in that order, labels read from the files.
std::vector<ManifestRow> scan_descriptor_dir(const std::string& dir);

// Tab-separated so paths and labels may contain commas and spaces.
void write_db_manifest(const std::string& path,
                       const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_db_manifest(const std::string& path);

// Load every manifest row (descriptor plus segment sidecars) into a
// validated database. Manifest labels win over the stored ones, so a
// corpus can be relabeled without re-encoding.
DescriptorDB load_db(const std::string& manifest_path);

// <stem>.segK.ild for <stem>.ild (1-based k).
std::string segment_path(const std::string& descriptor_path, int k);

} // namespace ilscape
