#include "ilscape/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

#include "ilscape/error.hpp"
#include "ilscape/parallel.hpp"

namespace ilscape {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(const std::string& origin, size_t line_no,
                            const std::string& msg) {
    fail_input(origin + " line " + std::to_string(line_no) + ": " + msg);
}

double parse_double(const std::string& origin, size_t line_no,
                    const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        fail_line(origin, line_no,
                  key + " needs a finite number, got '" + value + "'");
    return v;
}

int parse_int(const std::string& origin, size_t line_no,
              const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || v < INT_MIN || v > INT_MAX)
        fail_line(origin, line_no,
                  key + " needs an integer, got '" + value + "'");
    return static_cast<int>(v);
}

uint64_t parse_u64(const std::string& origin, size_t line_no,
                   const std::string& key, const std::string& value) {
    if (!value.empty() && value[0] == '-')
        fail_line(origin, line_no, key + " cannot be negative");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        fail_line(origin, line_no,
                  key + " needs an unsigned integer, got '" + value + "'");
    return v;
}

Vec3 parse_vec3(const std::string& origin, size_t line_no,
                const std::string& key, const std::string& value) {
    const char* p = value.c_str();
    double c[3];
    for (double& coord : c) {
        char* end = nullptr;
        coord = std::strtod(p, &end);
        if (end == p || !std::isfinite(coord))
            fail_line(origin, line_no,
                      key + " needs three numbers, got '" + value + "'");
        p = end;
    }
    while (*p == ' ' || *p == '\t') ++p;
    if (*p != '\0')
        fail_line(origin, line_no,
                  key + " needs exactly three numbers, got '" + value + "'");
    return Vec3(c[0], c[1], c[2]);
}

int attribute_index(const std::string& name) {
    for (int i = 0; i < kAttributeCount; ++i)
        if (kAttributeNames[i] == name) return i;
    return -1;
}

std::string slurp(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_input("cannot open " + what + ": " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return text;
}

} // namespace

SceneConfig scene_config_from_text(const std::string& text,
                                   const std::string& origin) {
    SceneConfig config;
    enum class Section { Top, Synth, Scales, Weights };
    Section section = Section::Top;
    bool saw_preset = false;

    size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail_line(origin, line_no, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "synth") {
                section = Section::Synth;
                config.use_synth = true;
            } else if (name == "scales") {
                section = Section::Scales;
            } else if (name == "weights") {
                section = Section::Weights;
            } else {
                fail_line(origin, line_no, "unknown section '" + name + "'");
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_line(origin, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_line(origin, line_no, "empty key");

        switch (section) {
        case Section::Top:
            if (key == "mesh") {
                config.mesh_path = value;
            } else if (key == "trajectories") {
                config.trajectory_path = value;
            } else if (key == "label") {
                config.label = value;
            } else if (key == "domain_size") {
                config.domain_size = parse_double(origin, line_no, key, value);
            } else if (key == "up_axis") {
                config.up_axis = parse_int(origin, line_no, key, value);
            } else if (key == "spacing") {
                config.spacing = parse_double(origin, line_no, key, value);
            } else if (key == "max_depth") {
                config.max_depth = parse_int(origin, line_no, key, value);
            } else if (key == "dt") {
                config.dt = parse_double(origin, line_no, key, value);
            } else if (key == "resolution") {
                config.resolution = parse_int(origin, line_no, key, value);
            } else if (key == "norm_mode") {
                try {
                    config.norm_mode = parse_norm_mode(value);
                } catch (const Error& e) {
                    fail_line(origin, line_no, e.what());
                }
            } else if (key == "bins") {
                config.bins = parse_int(origin, line_no, key, value);
            } else if (key == "seed") {
                config.seed = parse_u64(origin, line_no, key, value);
            } else {
                fail_line(origin, line_no, "unknown key '" + key + "'");
            }
            break;

        case Section::Synth:
            if (key == "preset") {
                try {
                    config.preset = parse_preset(value);
                } catch (const Error& e) {
                    fail_line(origin, line_no, e.what());
                }
                saw_preset = true;
            } else if (key == "particles") {
                config.synth.particles = parse_int(origin, line_no, key, value);
            } else if (key == "duration") {
                config.synth.duration = parse_double(origin, line_no, key, value);
            } else if (key == "speed") {
                config.synth.speed = parse_double(origin, line_no, key, value);
            } else if (key == "direction") {
                config.synth.direction = parse_vec3(origin, line_no, key, value);
            } else if (key == "axis") {
                config.synth.axis = parse_vec3(origin, line_no, key, value);
            } else if (key == "origin") {
                config.synth.origin = parse_vec3(origin, line_no, key, value);
            } else if (key == "rate") {
                config.synth.rate = parse_double(origin, line_no, key, value);
            } else if (key == "floor_z") {
                config.synth.floor_z = parse_double(origin, line_no, key, value);
            } else if (key == "emitter_min") {
                config.synth.emitter.min() =
                    parse_vec3(origin, line_no, key, value);
            } else if (key == "emitter_max") {
                config.synth.emitter.max() =
                    parse_vec3(origin, line_no, key, value);
            } else if (key == "sphere_center") {
                config.synth.sphere_center =
                    parse_vec3(origin, line_no, key, value);
            } else if (key == "sphere_radius") {
                config.synth.sphere_radius =
                    parse_double(origin, line_no, key, value);
            } else {
                fail_line(origin, line_no,
                          "unknown [synth] key '" + key + "'");
            }
            break;

        case Section::Scales:
        case Section::Weights: {
            const int a = attribute_index(key);
            if (a < 0)
                fail_line(origin, line_no,
                          "unknown attribute '" + key +
                              "' (expected Mt Md Ms Mw M O)");
            const double v = parse_double(origin, line_no, key, value);
            if (section == Section::Scales)
                config.scales[a] = v;
            else
                config.weights.w[a] = v;
            break;
        }
        }
    }

    if (config.use_synth && !saw_preset)
        fail_input(origin + ": the [synth] section needs a preset");
    return config;
}

SceneConfig load_scene_config(const std::string& path) {
    return scene_config_from_text(slurp(path, "scene config"), path);
}

void validate_scene_config(const SceneConfig& config) {
    if (config.mesh_path.empty())
        fail_input("scene config needs a mesh path");
    const bool has_file = !config.trajectory_path.empty();
    if (has_file == config.use_synth)
        fail_input("scene config needs exactly one motion source: a "
                   "trajectories path or a [synth] preset");
    if (!(config.spacing > 0.0) || !std::isfinite(config.spacing))
        fail_input("spacing must be positive, got " + num(config.spacing));
    if (config.max_depth < 1 || config.max_depth > 12)
        fail_input("max_depth must be between 1 and 12, got " +
                   std::to_string(config.max_depth));
    if (!(config.dt > 0.0) || !std::isfinite(config.dt))
        fail_input("dt must be positive, got " + num(config.dt));
    if (config.resolution != 4 && config.resolution != 8 &&
        config.resolution != 16)
        fail_input("resolution must be 4, 8, or 16, got " +
                   std::to_string(config.resolution));
    if (config.bins < 8 || config.bins > 64)
        fail_input("bins must be between 8 and 64, got " +
                   std::to_string(config.bins));
    if (config.up_axis < 0 || config.up_axis > 2)
        fail_input("up_axis must be 0, 1, or 2, got " +
                   std::to_string(config.up_axis));
    if (!std::isfinite(config.domain_size))
        fail_input("domain_size must be finite");
    for (int i = 0; i < kAttributeCount; ++i)
        if (!(config.scales[i] > 0.0) || !std::isfinite(config.scales[i]))
            fail_input(kAttributeNames[i] + " scale must be positive, got " +
                       num(config.scales[i]));
    double sum_w = 0.0;
    for (double w : config.weights.w) {
        if (w < 0.0 || !std::isfinite(w))
            fail_input("attribute weights must be finite and non-negative");
        sum_w += w;
    }
    if (!(sum_w > 0.0))
        fail_input("at least one attribute weight must be positive");
    if (config.use_synth) {
        if (config.synth.particles < 1)
            fail_input("particles must be at least 1, got " +
                       std::to_string(config.synth.particles));
        if (!(config.synth.duration > 0.0) ||
            !std::isfinite(config.synth.duration))
            fail_input("duration must be positive, got " +
                       num(config.synth.duration));
    }
}

AttributeWeights load_weights(const std::string& path) {
    const std::string text = slurp(path, "weights file");
    AttributeWeights weights;

    size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_line(path, line_no, "expected attribute = weight");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const int a = attribute_index(key);
        if (a < 0)
            fail_line(path, line_no,
                      "unknown attribute '" + key +
                          "' (expected Mt Md Ms Mw M O)");
        const double v = parse_double(path, line_no, key, value);
        if (v < 0.0)
            fail_line(path, line_no, key + " weight cannot be negative");
        weights.w[a] = v;
    }
    return weights;
}

PreparedScene prepare_scene(const SceneConfig& config) {
    validate_scene_config(config);

    PreparedScene scene;
    scene.config = config;
    scene.mesh = load_mesh(config.mesh_path);
    scene.surface = AabbTree(scene.mesh);
    scene.samples =
        poisson_disk_sample(scene.mesh, config.spacing, config.seed);
    const InteractionSpace space =
        build_space(scene.mesh, config.domain_size, config.up_axis);
    scene.tree = build_sensor_tree(space, scene.samples, config.max_depth);

    if (config.use_synth) {
        SynthParams params = config.synth;
        params.dt = config.dt;
        // The converge preset steers toward the scene's own surface; the
        // pointer is only read inside synthesize().
        if (config.preset == SynthPreset::Converge) params.target = &scene.mesh;
        scene.trajectories = synthesize(config.preset, params, config.seed);
    } else {
        scene.trajectories = read_trajectories(config.trajectory_path);
        // Only resample when the file's grid genuinely differs; resampling
        // replaces verbatim velocities with finite differences.
        if (std::abs(scene.trajectories.dt - config.dt) >
            1e-9 * std::max(1.0, config.dt))
            scene.trajectories = resample(scene.trajectories, config.dt);
    }
    return scene;
}

namespace {

// Core encoder shared by the failing and non-failing entry points: an
// empty window comes back as an inactive descriptor, not an error.
EncodeResult encode_window(const PreparedScene& scene, double t0, double t1) {
    const auto start = std::chrono::steady_clock::now();
    const SceneConfig& cfg = scene.config;

    const TrajectorySet* ts = &scene.trajectories;
    TrajectorySet clipped;
    const bool open0 = std::isnan(t0), open1 = std::isnan(t1);
    if (!open0 || !open1) {
        // Timestamps are nonnegative by contract, so an open start is 0.
        const double lo = open0 ? 0.0 : t0;
        const double hi =
            open1 ? std::numeric_limits<double>::infinity() : t1;
        if (lo < 0.0 || !(lo < hi))
            fail_input("encode window needs 0 <= t0 < t1, got [" + num(lo) +
                       ", " + num(hi) + "]");
        clipped = clip_to_window(*ts, lo, hi);
        ts = &clipped;
    }

    std::vector<TrajectorySample> flat;
    flat.reserve(ts->sample_count());
    for (const auto& p : ts->particles)
        for (size_t i = 0; i < p.t.size(); ++i)
            flat.push_back(
                {p.particle_id, p.t[i], p.position[i], p.velocity[i]});

    std::vector<int> owner(flat.size(), -1);
    parallel_for(flat.size(),
                 [&](size_t i) { owner[i] = scene.tree.locate(flat[i].position); });

    // Serial bucketing keeps each sensor's samples in track-major time
    // order, so per-cell sums never depend on the worker count.
    std::map<int, std::vector<TrajectorySample>> buckets;
    size_t binned = 0;
    for (size_t i = 0; i < flat.size(); ++i) {
        if (owner[i] < 0) continue;
        buckets[owner[i]].push_back(flat[i]);
        ++binned;
    }

    EncodeResult out;
    out.stats.window_samples = flat.size();
    out.stats.binned_samples = binned;
    out.stats.surface_samples = static_cast<int>(scene.samples.points.size());
    out.stats.sensor_count = static_cast<int>(scene.tree.sensors().size());

    const std::string label =
        !cfg.label.empty() ? cfg.label : scene.trajectories.label;

    if (buckets.empty()) {
        InteractionDescriptor d;
        d.bins = cfg.bins;
        d.resolution = cfg.resolution;
        d.norm_mode = cfg.norm_mode;
        d.scales = cfg.scales;
        d.active_sensors = 0;
        d.label = label;
        for (auto& h : d.hist) h.assign(cfg.bins, 0.0);
        out.descriptor = std::move(d);
    } else {
        std::vector<int> ids;
        std::vector<const std::vector<TrajectorySample>*> groups;
        ids.reserve(buckets.size());
        groups.reserve(buckets.size());
        for (const auto& [id, samples] : buckets) {
            ids.push_back(id);
            groups.push_back(&samples);
        }

        const size_t n = ids.size();
        out.fields.sensor_ids = ids;
        out.fields.fields.resize(n);
        out.fields.grids.resize(n);
        std::array<std::vector<LocalHistogram>, kAttributeCount> locals;
        for (auto& l : locals) l.resize(n);

        parallel_for(n, [&](size_t i) {
            const Sensor& sensor = scene.tree.sensor(ids[i]);
            VectorField field =
                bin_samples(sensor, *groups[i], cfg.resolution, cfg.norm_mode);
            const SurfaceCache cache =
                build_surface_cache(scene.surface, field);
            AttributeGrids grids = compute_attributes(field, cache);
            for (int a = 0; a < kAttributeCount; ++a)
                locals[a][i] = local_histogram(grids, a, field, sensor, cache,
                                               cfg.bins, cfg.scales[a]);
            out.fields.fields[i] = std::move(field);
            out.fields.grids[i] = std::move(grids);
        });

        out.descriptor = aggregate(locals, cfg.bins, cfg.resolution,
                                   cfg.norm_mode, cfg.scales, label);
    }

    out.stats.active_sensors = out.descriptor.active_sensors;
    out.stats.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return out;
}

} // namespace

EncodeResult encode_prepared(const PreparedScene& scene, double t0,
                             double t1) {
    EncodeResult out = encode_window(scene, t0, t1);
    if (out.descriptor.active_sensors == 0)
        fail_input("no interaction captured: every sensor stayed empty");
    return out;
}

EncodeResult encode_scene(const SceneConfig& config) {
    return encode_prepared(prepare_scene(config));
}

std::vector<InteractionDescriptor> segment_signatures(
    const PreparedScene& scene, int n_seg) {
    if (n_seg < 1)
        fail_input("segment count must be at least 1, got " +
                   std::to_string(n_seg));
    if (scene.trajectories.sample_count() == 0)
        fail_input("cannot segment an empty trajectory set");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : scene.trajectories.particles) {
        if (p.t.empty()) continue;
        lo = std::min(lo, p.t.front());
        hi = std::max(hi, p.t.back());
    }

    std::vector<InteractionDescriptor> segments;
    segments.reserve(n_seg);
    const double span = hi - lo;
    for (int k = 1; k <= n_seg; ++k) {
        // The last window (and every window of a single-instant set)
        // reuses the uncut samples so it matches the full descriptor
        // bit for bit.
        if (k == n_seg || !(span > 0.0)) {
            segments.push_back(encode_window(scene, kOpenWindow, kOpenWindow)
                                   .descriptor);
        } else {
            const double end = lo + span * double(k) / double(n_seg);
            segments.push_back(
                encode_window(scene, kOpenWindow, end).descriptor);
        }
    }
    return segments;
}

std::string segment_path(const std::string& descriptor_path, int k) {
    std::string stem = descriptor_path;
    if (stem.size() >= 4 && stem.compare(stem.size() - 4, 4, ".ild") == 0)
        stem.resize(stem.size() - 4);
    return stem + ".seg" + std::to_string(k) + ".ild";
}

namespace {

// <name>.segK.ild sidecars never enter the scan as entries of their own.
bool is_segment_sidecar(const std::string& name) {
    if (name.size() < 4 || name.compare(name.size() - 4, 4, ".ild") != 0)
        return false;
    const std::string core = name.substr(0, name.size() - 4);
    const size_t pos = core.rfind(".seg");
    if (pos == std::string::npos || pos + 4 >= core.size()) return false;
    for (size_t i = pos + 4; i < core.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(core[i]))) return false;
    return true;
}

} // namespace

std::vector<ManifestRow> scan_descriptor_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        fail_input("not a directory: " + dir);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() < 4 || name.compare(name.size() - 4, 4, ".ild") != 0)
            continue;
        if (is_segment_sidecar(name)) continue;
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());

    std::vector<ManifestRow> rows;
    rows.reserve(names.size());
    for (const std::string& name : names) {
        const std::string full = (fs::path(dir) / name).string();
        ManifestRow row;
        row.id = static_cast<int>(rows.size());
        row.file = name;
        row.label = load_descriptor(full).label;
        while (fs::exists(segment_path(full, row.segments + 1)))
            ++row.segments;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_db_manifest(const std::string& path,
                       const std::vector<ManifestRow>& rows) {
    std::string out = "id\tsegments\tfile\tlabel\n";
    for (const auto& row : rows) {
        if (row.id < 0)
            fail_input("manifest row has a negative id");
        if (row.segments < 0)
            fail_input("manifest row has a negative segment count");
        if (row.file.empty())
            fail_input("manifest row " + std::to_string(row.id) +
                       " has no file");
        if (row.file.find('\t') != std::string::npos ||
            row.file.find('\n') != std::string::npos ||
            row.label.find('\t') != std::string::npos ||
            row.label.find('\n') != std::string::npos)
            fail_input("manifest fields cannot contain tabs or newlines");
        out += std::to_string(row.id) + "\t" + std::to_string(row.segments) +
               "\t" + row.file + "\t" + row.label + "\n";
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) fail_input("cannot write manifest: " + path);
    file << out;
    if (!file.good()) fail_input("failed writing manifest: " + path);
}

std::vector<ManifestRow> read_db_manifest(const std::string& path) {
    const std::string text = slurp(path, "db manifest");

    std::vector<ManifestRow> rows;
    size_t pos = 0, line_no = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (!saw_header) {
            if (line != "id\tsegments\tfile\tlabel")
                fail_line(path, line_no,
                          "expected header 'id\tsegments\tfile\tlabel'");
            saw_header = true;
            continue;
        }

        ManifestRow row;
        size_t a = line.find('\t');
        size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
        size_t c = b == std::string::npos ? b : line.find('\t', b + 1);
        if (c == std::string::npos)
            fail_line(path, line_no, "expected 4 tab-separated fields");
        row.id = parse_int(path, line_no, "id", line.substr(0, a));
        row.segments =
            parse_int(path, line_no, "segments", line.substr(a + 1, b - a - 1));
        row.file = line.substr(b + 1, c - b - 1);
        row.label = line.substr(c + 1);
        if (row.file.empty()) fail_line(path, line_no, "empty file field");
        rows.push_back(std::move(row));
    }
    if (!saw_header) fail_input(path + ": empty manifest");
    return rows;
}

DescriptorDB load_db(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    const std::vector<ManifestRow> rows = read_db_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    DescriptorDB db;
    for (const auto& row : rows) {
        fs::path file(row.file);
        if (file.is_relative()) file = base / file;
        try {
            DbEntry entry;
            entry.id = row.id;
            entry.label = row.label;
            entry.descriptor = load_descriptor(file.string());
            for (int k = 1; k <= row.segments; ++k)
                entry.segments.push_back(
                    load_descriptor(segment_path(file.string(), k)));
            db_add(db, std::move(entry));
        } catch (const Error& e) {
            throw Error(e.kind(), row.file + ": " + e.what());
        }
    }
    return db;
}

} // namespace ilscape
