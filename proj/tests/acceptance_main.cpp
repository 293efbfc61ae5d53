// Acceptance gate: nine pinned checks over the whole pipeline, one
// PASS/FAIL line each, nonzero exit when any fails. Every scene is
// synthesized from fixed seeds so the binary is self-contained; scratch
// files land under the system temp directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ilscape/aabb_tree.hpp"
#include "ilscape/analysis.hpp"
#include "ilscape/descriptor.hpp"
#include "ilscape/error.hpp"
#include "ilscape/flowfield.hpp"
#include "ilscape/mesh.hpp"
#include "ilscape/pipeline.hpp"
#include "ilscape/rng.hpp"
#include "ilscape/sampling.hpp"
#include "ilscape/sensor_grid.hpp"
#include "ilscape/trajectory.hpp"

namespace fs = std::filesystem;
using namespace ilscape;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome ok(const std::string& detail) { return {true, detail}; }
Outcome bad(const std::string& detail) { return {false, detail}; }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "ilscape_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Unit plate centered on the origin in the z = 0 plane; rotations about
// the up axis then keep the interaction space fixed.
Mesh plate(double sx, double sy) {
    std::vector<Vec3> v = {{-sx / 2, -sy / 2, 0},
                           {sx / 2, -sy / 2, 0},
                           {sx / 2, sy / 2, 0},
                           {-sx / 2, sy / 2, 0}};
    std::vector<std::array<int, 3>> t = {{0, 1, 2}, {0, 2, 3}};
    return make_mesh(std::move(v), std::move(t));
}

const std::string& plate_obj() {
    static const std::string path = [] {
        const fs::path p = work_dir() / "plate.obj";
        std::ofstream out(p);
        out << "v -0.5 -0.5 0\nv 0.5 -0.5 0\nv 0.5 0.5 0\nv -0.5 0.5 0\n"
               "f 1 2 3\nf 1 3 4\n";
        return p.string();
    }();
    return path;
}

SceneConfig base_config() {
    SceneConfig c;
    c.mesh_path = plate_obj();
    c.use_synth = true;
    c.domain_size = 2.0;
    c.spacing = 0.1;
    c.max_depth = 8;
    c.dt = 0.025;
    c.resolution = 8;
    c.bins = 16;
    c.norm_mode = NormMode::Average;
    return c;
}

// One sample per cell center carrying v(center): the average-mode field
// then holds the exact nodal values of v.
VectorField analytic_field(int res,
                           const std::function<Vec3(const Vec3&)>& v) {
    Sensor s;
    s.id = 0;
    s.center = Vec3::Zero();
    s.size = 2.0;
    VectorField probe = bin_samples(s, {}, res, NormMode::Average);
    std::vector<TrajectorySample> samples;
    for (int k = 0; k < res; ++k)
        for (int j = 0; j < res; ++j)
            for (int i = 0; i < res; ++i) {
                TrajectorySample ts;
                ts.position = probe.cell_center(i, j, k);
                ts.velocity = v(ts.position);
                samples.push_back(ts);
            }
    return bin_samples(s, samples, res, NormMode::Average);
}

// Quarter turns about +z as exact coordinate swaps and sign flips, so a
// rotated scene is the bitwise image of the original.
Vec3 quarter_turn(const Vec3& p, int q) {
    switch (q & 3) {
        case 1: return Vec3(-p.y(), p.x(), p.z());
        case 2: return Vec3(-p.x(), -p.y(), p.z());
        case 3: return Vec3(p.y(), -p.x(), p.z());
        default: return p;
    }
}

Mesh rotate_mesh(const Mesh& m, int q) {
    std::vector<Vec3> v;
    v.reserve(m.vertices.size());
    for (const Vec3& p : m.vertices) v.push_back(quarter_turn(p, q));
    return make_mesh(std::move(v), m.triangles);
}

TrajectorySet rotate_trajectories(const TrajectorySet& ts, int q) {
    TrajectorySet out = ts;
    for (ParticleTrack& p : out.particles)
        for (size_t i = 0; i < p.t.size(); ++i) {
            p.position[i] = quarter_turn(p.position[i], q);
            p.velocity[i] = quarter_turn(p.velocity[i], q);
        }
    return out;
}

// prepare_scene for a mesh and trajectories that only exist in memory.
PreparedScene assemble(const SceneConfig& cfg, Mesh mesh,
                       TrajectorySet traj) {
    PreparedScene s;
    s.config = cfg;
    s.mesh = std::move(mesh);
    s.surface = AabbTree(s.mesh);
    s.samples = poisson_disk_sample(s.mesh, cfg.spacing, cfg.seed);
    s.tree = build_sensor_tree(
        build_space(s.mesh, cfg.domain_size, cfg.up_axis), s.samples,
        cfg.max_depth);
    s.trajectories = std::move(traj);
    return s;
}

// Shared synthetic corpus: 3 motion classes x 5 jittered instances over
// the same plate. Built once, reused by the sensor-count, retrieval and
// prediction checks.
struct Corpus {
    std::vector<PreparedScene> scenes;
    std::vector<EncodeResult> encodes;
    DescriptorDB db; // segments filled with 8 cumulative windows
    std::vector<std::vector<double>> matrix;
    ClassSpread spread;
};

SceneConfig corpus_config(const std::string& cls, int i) {
    SceneConfig c = base_config();
    c.label = cls;
    SynthParams& p = c.synth;
    p.particles = 350;
    p.duration = 1.0;
    const double j = 0.05 * (i - 2); // -0.1 .. 0.1 across instances
    if (cls == "swirl") {
        c.preset = SynthPreset::Swirl;
        c.seed = 100 + i;
        p.axis = Vec3(0, 0, 1.0 + j);
        p.origin = Vec3(j, -j, 0);
        p.emitter = Box3(Vec3(-0.45, -0.45, 0.05), Vec3(0.45, 0.45, 0.5));
    } else if (cls == "translate") {
        c.preset = SynthPreset::Translate;
        c.seed = 200 + i;
        p.direction = Vec3(1, j, 0);
        p.speed = 1.0 + j;
        p.emitter = Box3(Vec3(-0.7, -0.35, 0.05), Vec3(-0.3, 0.35, 0.4));
    } else {
        c.preset = SynthPreset::Pour;
        c.seed = 300 + i;
        p.floor_z = 0.0;
        p.emitter = Box3(Vec3(-0.15 + j, -0.15, 0.6), Vec3(0.15 + j, 0.15, 0.9));
    }
    return c;
}

const Corpus& corpus() {
    static const Corpus built = [] {
        Corpus c;
        for (const std::string cls : {"swirl", "translate", "pour"})
            for (int i = 0; i < 5; ++i) {
                c.scenes.push_back(prepare_scene(corpus_config(cls, i)));
                c.encodes.push_back(encode_prepared(c.scenes.back()));
            }
        for (size_t e = 0; e < c.encodes.size(); ++e) {
            DbEntry entry;
            entry.id = static_cast<int>(e);
            entry.label = c.encodes[e].descriptor.label;
            entry.descriptor = c.encodes[e].descriptor;
            entry.segments = segment_signatures(c.scenes[e], 8);
            db_add(c.db, std::move(entry));
        }
        c.matrix = distance_matrix(c.db);
        c.spread = class_spread(c.db, c.matrix);
        return c;
    }();
    return built;
}

DescriptorDB without_entry(const DescriptorDB& db, size_t skip) {
    DescriptorDB out;
    for (size_t i = 0; i < db.entries.size(); ++i)
        if (i != skip) db_add(out, db.entries[i]);
    return out;
}

// ---- criterion bodies ------------------------------------------------

Outcome attribute_oracle() {
    const Mesh quad = plate(1, 1);
    const AabbTree tree(quad);
    const int res = 8;
    const auto swirl =
        analytic_field(res, [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0); });
    const auto source = analytic_field(res, [](const Vec3& p) { return p; });
    const auto gs = compute_attributes(swirl, tree);
    const auto gr = compute_attributes(source, tree);

    const std::array<double, 4> want_swirl = {1.0, 0.0, 0.0, 1.0};
    const std::array<double, 4> want_source = {std::sqrt(1.5), std::sqrt(3.0),
                                               0.0, 0.0};
    double worst = 0.0;
    for (int k = 1; k < res - 1; ++k)
        for (int j = 1; j < res - 1; ++j)
            for (int i = 1; i < res - 1; ++i) {
                const int cell = swirl.index(i, j, k);
                for (int a = 0; a < 4; ++a) {
                    const double es = want_swirl[a];
                    const double er = want_source[a];
                    worst = std::max(
                        worst, std::abs(gs.values[a][cell] - es) /
                                   std::max(1.0, std::abs(es)));
                    worst = std::max(
                        worst, std::abs(gr.values[a][cell] - er) /
                                   std::max(1.0, std::abs(er)));
                }
            }
    if (worst > 1e-6)
        return bad("max relative error " + num(worst) + " exceeds 1e-6");
    return ok("max relative error " + num(worst));
}

Outcome decomposition_identity() {
    Rng rng(42);
    const int res = 8;
    Sensor s;
    s.id = 0;
    s.center = Vec3::Zero();
    s.size = 2.0;
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        VectorField f = bin_samples(s, {}, res, NormMode::Average);
        for (Vec3& u : f.u)
            u = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5),
                     rng.uniform(-5, 5));
        for (int k = 0; k < res; ++k)
            for (int j = 0; j < res; ++j)
                for (int i = 0; i < res; ++i) {
                    const Mat3 T = gradient_tensor(f, i, j, k);
                    const TensorParts p = split_tensor(T);
                    const double err =
                        (strain_matrix(p) + spin_matrix(p) - T).norm();
                    worst = std::max(worst, err);
                }
    }
    if (worst > 1e-9)
        return bad("max |S + A - T| " + num(worst) + " exceeds 1e-9");
    return ok("max |S + A - T| " + num(worst) + " over 1000 fields");
}

Outcome time_variance_switch() {
    // Long plate so both sweeps stay over the same sensor-depth profile,
    // and dt small enough that every track paints a solid line of cells;
    // otherwise tube geometry, not speed, would separate the runs.
    SceneConfig cfg = base_config();
    cfg.label = "drift";
    const fs::path obj = work_dir() / "long_plate.obj";
    {
        std::ofstream out(obj);
        out << "v -2 -0.5 0\nv 2 -0.5 0\nv 2 0.5 0\nv -2 0.5 0\n"
               "f 1 2 3\nf 1 3 4\n";
    }
    cfg.mesh_path = obj.string();
    cfg.domain_size = 6.0; // keep the 2x run inside the space
    cfg.dt = 0.0025;
    cfg.preset = SynthPreset::Translate;
    cfg.seed = 7;
    cfg.synth.particles = 600;
    cfg.synth.duration = 1.0;
    cfg.synth.direction = Vec3(1, 0, 0);
    cfg.synth.emitter = Box3(Vec3(-1.8, -0.4, 0.1), Vec3(-1.4, 0.4, 0.45));

    std::array<double, 2> dist{};
    for (const NormMode mode : {NormMode::Direction, NormMode::Average}) {
        cfg.norm_mode = mode;
        cfg.synth.speed = 1.0;
        PreparedScene slow = prepare_scene(cfg);
        cfg.synth.speed = 2.0;
        PreparedScene fast = prepare_scene(cfg);
        dist[mode == NormMode::Average] =
            distance(encode_prepared(slow).descriptor,
                     encode_prepared(fast).descriptor);
    }
    const double d_dir = dist[0], d_avg = dist[1];
    const std::string detail =
        "direction " + num(d_dir) + ", average " + num(d_avg);
    if (!(d_dir < 0.02)) return bad(detail + "; direction mode not < 0.02");
    if (!(d_avg >= 5.0 * d_dir))
        return bad(detail + "; average mode not >= 5x direction mode");
    return ok(detail);
}

Outcome rotation_robustness() {
    SceneConfig cfg = base_config();
    cfg.label = "oblique";
    cfg.domain_size = 4.0;
    cfg.seed = 21;
    SynthParams p = cfg.synth;
    p.particles = 500;
    p.duration = 1.0;
    p.speed = 1.0;
    p.direction = Vec3(1, 0.4, 0);
    p.emitter = Box3(Vec3(-0.6, -0.3, 0.05), Vec3(-0.2, 0.1, 0.35));

    const Mesh slab = plate(1.6, 0.8);
    const TrajectorySet traj = synthesize(SynthPreset::Translate, p, cfg.seed);
    const InteractionDescriptor base =
        encode_prepared(assemble(cfg, slab, traj)).descriptor;

    double worst = 0.0;
    for (int q = 1; q <= 3; ++q) {
        const InteractionDescriptor turned =
            encode_prepared(assemble(cfg, rotate_mesh(slab, q),
                                     rotate_trajectories(traj, q)))
                .descriptor;
        worst = std::max(worst, distance(base, turned));
    }
    if (!(worst < 0.05))
        return bad("max distance after rotation " + num(worst) +
                   " not < 0.05");
    return ok("max distance over 90/180/270 turns " + num(worst));
}

Outcome sensor_count_independence() {
    // Dense surface sampling so depth 8 really refines depth 7, and an
    // emitter reaching down to the surface so the refined cells track
    // particles; a motion that stays high never sees the extra depth.
    SceneConfig cfg = base_config();
    cfg.label = "fine-swirl";
    cfg.preset = SynthPreset::Swirl;
    cfg.seed = 31;
    cfg.spacing = 0.008;
    cfg.synth.particles = 600;
    cfg.synth.duration = 1.0;
    cfg.synth.axis = Vec3(0, 0, 1);
    cfg.synth.emitter = Box3(Vec3(-0.4, -0.4, 0.004), Vec3(0.4, 0.4, 0.45));

    cfg.max_depth = 7;
    const EncodeResult e7 = encode_scene(cfg);
    cfg.max_depth = 8;
    const EncodeResult e8 = encode_scene(cfg);
    if (e7.stats.sensor_count == e8.stats.sensor_count)
        return bad("depth 7 and depth 8 trees are identical; the check "
                   "exercised nothing");

    const double d = distance(e7.descriptor, e8.descriptor);
    const double intra = corpus().spread.intra;
    std::string detail = "cross-depth distance " + num(d) + " (sensors " +
                         std::to_string(e7.stats.sensor_count) + " vs " +
                         std::to_string(e8.stats.sensor_count) +
                         "), corpus intra mean " + num(intra);
    if (!(d < 0.1)) return bad(detail + "; not < 0.1");
    if (!(d < intra)) return bad(detail + "; not < intra-class mean");
    return ok(detail);
}

Outcome retrieval_accuracy() {
    const Corpus& c = corpus();
    const LooResult loo = loo_nearest(c.db);
    std::string detail = "leave-one-out " + std::to_string(loo.correct) +
                         "/" + std::to_string(loo.total) + ", intra " +
                         num(c.spread.intra) + " vs inter " +
                         num(c.spread.inter);
    if (!(loo.accuracy >= 0.9)) return bad(detail + "; accuracy not >= 0.9");
    if (!(c.spread.intra < c.spread.inter))
        return bad(detail + "; intra mean not below inter mean");
    return ok(detail);
}

Outcome progressive_prediction() {
    const Corpus& c = corpus();
    const size_t n = c.db.entries.size();
    const int top = static_cast<int>(n) - 1;

    std::array<double, 8> precision{};
    for (size_t q = 0; q < n; ++q) {
        const DescriptorDB rest = without_entry(c.db, q);
        for (int k = 1; k <= 8; ++k) {
            const RetrievalResult r =
                predict(rest, c.db.entries[q].segments[k - 1], k);
            precision[k - 1] += precision_at(r.pr, 0.5);
        }
        // The finished motion must rank exactly like plain retrieval.
        const RetrievalResult last =
            predict(rest, c.db.entries[q].segments[7], 8);
        const RetrievalResult full =
            retrieve(rest, c.db.entries[q].descriptor, top);
        if (last.matches.size() != full.matches.size())
            return bad("span 8 and full retrieval rank different counts");
        for (size_t m = 0; m < full.matches.size(); ++m)
            if (last.matches[m].id != full.matches[m].id ||
                last.matches[m].dist != full.matches[m].dist)
                return bad("span 8 ranking differs from full retrieval at "
                           "rank " + std::to_string(m + 1));
    }
    for (double& p : precision) p /= static_cast<double>(n);

    // One adjacent-rank swap in a single query moves interpolated
    // precision at recall 0.5 by at most 1/3; averaged over the queries
    // that is the tolerated monotonicity noise.
    const double swap_noise = (1.0 / 3.0) / static_cast<double>(n);
    std::string curve;
    for (int k = 0; k < 8; ++k) curve += (k ? " " : "") + num(precision[k]);
    if (!(precision[0] >= 0.5))
        return bad("precision at recall 0.5 for one segment is " +
                   num(precision[0]) + ", not >= 0.5 (curve " + curve + ")");
    for (int k = 1; k < 8; ++k)
        if (precision[k] + swap_noise < precision[k - 1])
            return bad("precision drops from span " + std::to_string(k) +
                       " to " + std::to_string(k + 1) + " (curve " + curve +
                       ")");
    return ok("precision at recall 0.5 by span: " + curve);
}

Outcome encoding_throughput() {
    SceneConfig cfg = base_config();
    cfg.label = "bulk";
    cfg.preset = SynthPreset::Translate;
    cfg.seed = 77;
    cfg.synth.particles = 12500; // 41 samples each: 512500 >= 500k
    cfg.synth.duration = 1.0;
    cfg.synth.speed = 1.0;
    cfg.synth.emitter = Box3(Vec3(-0.7, -0.4, 0.05), Vec3(-0.3, 0.4, 0.45));

    const PreparedScene scene = prepare_scene(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const EncodeResult enc = encode_prepared(scene);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::string detail = std::to_string(enc.stats.window_samples) +
                         " samples in " + num(secs) + " s (" +
                         std::to_string(enc.stats.active_sensors) +
                         " active sensors)";
    if (enc.stats.window_samples < 500000)
        return bad(detail + "; fewer than 500k samples");
    if (!(secs < 5.0)) return bad(detail + "; not < 5 s");
    return ok(detail);
}

// Everything the toolkit writes, produced from one seed into dir.
void artifact_pass(const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<SceneConfig> cfgs;
    for (int i = 0; i < 2; ++i) {
        SceneConfig c = corpus_config("swirl", i);
        c.seed = 501 + i;
        c.max_depth = 6;
        cfgs.push_back(c);
        c = corpus_config("translate", i);
        c.seed = 601 + i;
        c.max_depth = 6;
        cfgs.push_back(c);
    }
    PreparedScene first_scene;
    EncodeResult first_enc;
    for (size_t i = 0; i < cfgs.size(); ++i) {
        PreparedScene scene = prepare_scene(cfgs[i]);
        EncodeResult enc = encode_prepared(scene);
        const fs::path out = dir / ("entry" + std::to_string(i) + ".ild");
        save_descriptor(out.string(), enc.descriptor);
        const auto segs = segment_signatures(scene, 2);
        for (size_t k = 0; k < segs.size(); ++k)
            save_descriptor(segment_path(out.string(), static_cast<int>(k) + 1),
                            segs[k]);
        if (i == 0) {
            first_scene = std::move(scene);
            first_enc = std::move(enc);
        }
    }

    const fs::path manifest = dir / "db.tsv";
    write_db_manifest(manifest.string(), scan_descriptor_dir(dir.string()));
    const DescriptorDB db = load_db(manifest.string());

    const auto matrix = distance_matrix(db);
    write_distance_matrix_csv((dir / "matrix.csv").string(), db, matrix);
    const RetrievalResult r =
        retrieve(db, db.entries[0].descriptor,
                 static_cast<int>(db.entries.size()));
    write_pr_csv((dir / "pr.csv").string(), r.pr);
    const auto points = mds_embed(matrix);
    write_mds_csv((dir / "mds.csv").string(), db, points);
    write_mds_svg((dir / "mds.svg").string(), db, points);

    const double radius =
        (first_scene.tree.space().max().x() - first_scene.tree.space().min().x()) /
        (1 << first_scene.config.max_depth);
    const SaliencyMap map = saliency(first_scene.mesh, first_scene.tree,
                                     first_enc.fields, AttributeWeights{},
                                     radius);
    write_saliency_csv((dir / "saliency.csv").string(), map);
    write_saliency_obj((dir / "saliency.obj").string(), first_scene.mesh, map);
    const auto matches =
        correspondence(first_scene.mesh, map, first_scene.mesh, map, 8);
    write_matches_csv((dir / "matches.csv").string(), matches);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path a = work_dir() / "run_a";
    const fs::path b = work_dir() / "run_b";
    const fs::path c = work_dir() / "run_c";
    unsetenv("ILSCAPE_THREADS");
    artifact_pass(a);
    setenv("ILSCAPE_THREADS", "3", 1);
    artifact_pass(b);
    unsetenv("ILSCAPE_THREADS");
    artifact_pass(c);

    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const std::string name = entry.path().filename().string();
        const std::string ref = slurp(entry.path());
        if (ref != slurp(b / name))
            return bad(name + " differs between worker counts");
        if (ref != slurp(c / name))
            return bad(name + " differs between identical reruns");
        ++files;
    }
    return ok(std::to_string(files) +
              " artifacts bit-identical across reruns and worker counts");
}

struct Criterion {
    const char* name;
    double time_limit;
    std::function<Outcome()> body;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"attribute oracle", 1.0, attribute_oracle},
        {"strain plus spin identity", 5.0, decomposition_identity},
        {"time-variance switch", 30.0, time_variance_switch},
        {"rotation robustness", 60.0, rotation_robustness},
        {"sensor-count independence", 60.0, sensor_count_independence},
        {"corpus retrieval", 300.0, retrieval_accuracy},
        {"progressive prediction", 600.0, progressive_prediction},
        {"encoding throughput", 0.0, encoding_throughput}, // 5 s bound is on the encode step itself
        {"deterministic artifacts", 0.0, determinism},
    };

    int failed = 0;
    for (size_t i = 0; i < std::size(criteria); ++i) {
        const Criterion& c = criteria[i];
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = bad(std::string("threw: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (out.pass && c.time_limit > 0.0 && secs > c.time_limit)
            out = bad(out.detail + "; took " + num(secs) +
                      " s, limit " + num(c.time_limit) + " s");
        std::printf("criterion %zu: %s %s (%s; %.1f s)\n", i + 1,
                    out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(),
                    secs);
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    if (failed) {
        std::printf("acceptance: %d of 9 criteria failed\n", failed);
        return 1;
    }
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
}
