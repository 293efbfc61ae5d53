#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilscape/analysis.hpp"
#include "ilscape/error.hpp"
#include "ilscape/pipeline.hpp"

using namespace ilscape;

namespace {

Vec3 to_vec3(const std::vector<double>& v) {
    return Vec3(v[0], v[1], v[2]);
}

// The finest sensor edge: a usable default reach for saliency queries.
double default_radius(const PreparedScene& scene) {
    const Box3& box = scene.tree.space();
    const double edge = box.max().x() - box.min().x();
    return edge / double(1 << scene.config.max_depth);
}

void print_encode_stats(const EncodeStats& stats) {
    std::printf("surface samples: %d\n", stats.surface_samples);
    std::printf("sensors: %d (active %d)\n", stats.sensor_count,
                stats.active_sensors);
    std::printf("trajectory samples: %zu (binned %zu)\n",
                stats.window_samples, stats.binned_samples);
    std::printf("encode time: %.2f s\n", stats.seconds);
}

void print_matches(const RetrievalResult& result) {
    for (size_t i = 0; i < result.matches.size(); ++i) {
        const RankedMatch& m = result.matches[i];
        std::printf("%zu\t%d\t%s\t%.6f\n", i + 1, m.id,
                    m.label.empty() ? "(unlabeled)" : m.label.c_str(),
                    m.dist);
    }
}

void write_pr_if_asked(const std::string& path,
                       const RetrievalResult& result) {
    if (path.empty()) return;
    if (!result.pr_valid)
        warn("query has no label or its class is absent; "
             "precision/recall left empty");
    write_pr_csv(path, result.pr);
    std::printf("wrote %s\n", path.c_str());
}

// All flag values an `encode` run may override; count() on the matching
// option decides whether a value replaces the config's.
struct EncodeArgs {
    std::string scene, out;
    double t0 = 0.0, t1 = 0.0;
    int segments = 0;

    std::string mesh, trajectories, label, norm_mode, preset;
    double domain_size = 0.0, spacing = 0.0, dt = 0.0;
    int up_axis = 0, max_depth = 0, resolution = 0, bins = 0;
    uint64_t seed = 0;
};

struct GenArgs {
    std::string preset, out, mesh;
    uint64_t seed = 1;
    int particles = 2000;
    double duration = 1.0, dt = 0.025, speed = 1.0, rate = 1.0;
    double floor_z = 0.0, sphere_radius = 1.0;
    std::vector<double> direction, axis, origin, sphere_center;
    std::vector<double> emitter_min, emitter_max;
};

struct DbArgs {
    std::string dir, out, manifest, query, csv, matrix, weights, variant;
    int top_k = 10;
    int k = 1;
};

struct SaliencyArgs {
    std::string scene, out, csv, weights;
    double radius = 0.0;
};

struct CorrespondArgs {
    std::string scene_a, scene_b, out, weights;
    double radius = 0.0;
    int grid = 8;
};

AttributeWeights weights_or_default(const std::string& path) {
    return path.empty() ? AttributeWeights{} : load_weights(path);
}

BhattVariant variant_or_default(const std::string& name) {
    return name.empty() ? BhattVariant::Coefficient
                        : parse_bhatt_variant(name);
}

SaliencyMap scene_saliency(const PreparedScene& scene,
                           const EncodeResult& encoded,
                           const std::string& weights_path, double radius) {
    const AttributeWeights weights = weights_path.empty()
                                         ? scene.config.weights
                                         : load_weights(weights_path);
    const double reach = radius > 0.0 ? radius : default_radius(scene);
    return saliency(scene.mesh, scene.tree, encoded.fields, weights, reach);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"interaction landscape toolkit: encode motion near a "
                 "shape into comparable descriptors"};
    app.require_subcommand(1);
    app.footer("Environment: ILSCAPE_THREADS caps worker count (0 = auto).");

    // encode
    EncodeArgs enc;
    CLI::App* cmd_encode = app.add_subcommand(
        "encode", "run the full pipeline on a scene config and save a "
                  "descriptor (.ild)");
    cmd_encode->add_option("--scene", enc.scene, "scene config file")
        ->required();
    cmd_encode->add_option("--out", enc.out, "descriptor output path")
        ->required();
    auto* o_t0 = cmd_encode->add_option("--t0", enc.t0,
                                        "window start (seconds)");
    auto* o_t1 = cmd_encode->add_option("--t1", enc.t1,
                                        "window end (seconds)");
    cmd_encode->add_option(
        "--segments", enc.segments,
        "also write <out>.segK.ild cumulative prefix descriptors");
    auto* o_mesh = cmd_encode->add_option("--mesh", enc.mesh,
                                          "override: mesh path");
    auto* o_traj = cmd_encode->add_option("--trajectories", enc.trajectories,
                                          "override: trajectory csv");
    auto* o_preset = cmd_encode->add_option("--preset", enc.preset,
                                            "override: synth preset");
    auto* o_label = cmd_encode->add_option("--label", enc.label,
                                           "override: descriptor label");
    auto* o_domain = cmd_encode->add_option("--domain-size", enc.domain_size,
                                            "override: sensor space edge");
    auto* o_up = cmd_encode->add_option("--up-axis", enc.up_axis,
                                        "override: up axis (0/1/2)");
    auto* o_spacing = cmd_encode->add_option("--spacing", enc.spacing,
                                             "override: surface sample spacing");
    auto* o_depth = cmd_encode->add_option("--max-depth", enc.max_depth,
                                           "override: octree depth cap");
    auto* o_dt = cmd_encode->add_option("--dt", enc.dt,
                                        "override: time step");
    auto* o_res = cmd_encode->add_option("--resolution", enc.resolution,
                                         "override: field resolution");
    auto* o_norm = cmd_encode->add_option("--norm-mode", enc.norm_mode,
                                          "override: average or direction");
    auto* o_bins = cmd_encode->add_option("--bins", enc.bins,
                                          "override: histogram bins");
    auto* o_seed = cmd_encode->add_option("--seed", enc.seed,
                                          "override: rng seed");
    cmd_encode->callback([&] {
        SceneConfig config = load_scene_config(enc.scene);
        if (o_mesh->count()) config.mesh_path = enc.mesh;
        if (o_traj->count()) {
            config.trajectory_path = enc.trajectories;
            config.use_synth = false;
        }
        if (o_preset->count()) {
            config.preset = parse_preset(enc.preset);
            config.use_synth = true;
            config.trajectory_path.clear();
        }
        if (o_label->count()) config.label = enc.label;
        if (o_domain->count()) config.domain_size = enc.domain_size;
        if (o_up->count()) config.up_axis = enc.up_axis;
        if (o_spacing->count()) config.spacing = enc.spacing;
        if (o_depth->count()) config.max_depth = enc.max_depth;
        if (o_dt->count()) config.dt = enc.dt;
        if (o_res->count()) config.resolution = enc.resolution;
        if (o_norm->count()) config.norm_mode = parse_norm_mode(enc.norm_mode);
        if (o_bins->count()) config.bins = enc.bins;
        if (o_seed->count()) config.seed = enc.seed;

        if (enc.segments > 0 && (o_t0->count() || o_t1->count()))
            fail_input("--segments spans the full motion; drop --t0/--t1");

        const PreparedScene scene = prepare_scene(config);
        const double t0 = o_t0->count() ? enc.t0 : kOpenWindow;
        const double t1 = o_t1->count() ? enc.t1 : kOpenWindow;
        const EncodeResult result = encode_prepared(scene, t0, t1);
        save_descriptor(enc.out, result.descriptor);
        print_encode_stats(result.stats);
        std::printf("wrote %s\n", enc.out.c_str());

        if (enc.segments > 0) {
            const std::vector<InteractionDescriptor> segs =
                segment_signatures(scene, enc.segments);
            for (int k = 1; k <= enc.segments; ++k) {
                const std::string path = segment_path(enc.out, k);
                save_descriptor(path, segs[k - 1]);
                std::printf("wrote %s\n", path.c_str());
            }
        }
    });

    // compare
    std::string cmp_a, cmp_b, cmp_weights, cmp_variant;
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "print the distance between two descriptors");
    cmd_compare->add_option("a", cmp_a, "first .ild")->required();
    cmd_compare->add_option("b", cmp_b, "second .ild")->required();
    cmd_compare->add_option("--weights", cmp_weights,
                            "attribute weight file");
    cmd_compare->add_option("--variant", cmp_variant,
                            "coefficient (default) or log");
    cmd_compare->callback([&] {
        const double d = distance(load_descriptor(cmp_a),
                                  load_descriptor(cmp_b),
                                  weights_or_default(cmp_weights),
                                  variant_or_default(cmp_variant));
        std::printf("%.6f\n", d);
    });

    // gen
    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand(
        "gen", "synthesize a trajectory csv from a motion preset");
    cmd_gen->add_option("--preset", gen.preset,
                        "translate swirl source pour converge")
        ->required();
    cmd_gen->add_option("--out", gen.out, "trajectory csv path")->required();
    cmd_gen->add_option("--seed", gen.seed, "rng seed");
    cmd_gen->add_option("--mesh", gen.mesh,
                        "goal surface (converge preset only)");
    cmd_gen->add_option("--particles", gen.particles, "particle count");
    cmd_gen->add_option("--duration", gen.duration, "seconds of motion");
    cmd_gen->add_option("--dt", gen.dt, "time step");
    cmd_gen->add_option("--speed", gen.speed, "translate speed");
    cmd_gen->add_option("--rate", gen.rate, "source expansion rate");
    cmd_gen->add_option("--floor-z", gen.floor_z, "pour stop height");
    cmd_gen->add_option("--sphere-radius", gen.sphere_radius,
                        "converge start sphere radius");
    cmd_gen->add_option("--direction", gen.direction, "translate direction")
        ->expected(3);
    cmd_gen->add_option("--axis", gen.axis, "swirl angular velocity")
        ->expected(3);
    cmd_gen->add_option("--origin", gen.origin, "swirl/source center")
        ->expected(3);
    cmd_gen->add_option("--sphere-center", gen.sphere_center,
                        "converge start sphere center")
        ->expected(3);
    cmd_gen->add_option("--emitter-min", gen.emitter_min,
                        "emitter box minimum")
        ->expected(3);
    cmd_gen->add_option("--emitter-max", gen.emitter_max,
                        "emitter box maximum")
        ->expected(3);
    cmd_gen->callback([&] {
        const SynthPreset preset = parse_preset(gen.preset);
        SynthParams params;
        params.particles = gen.particles;
        params.duration = gen.duration;
        params.dt = gen.dt;
        params.speed = gen.speed;
        params.rate = gen.rate;
        params.floor_z = gen.floor_z;
        params.sphere_radius = gen.sphere_radius;
        if (!gen.direction.empty()) params.direction = to_vec3(gen.direction);
        if (!gen.axis.empty()) params.axis = to_vec3(gen.axis);
        if (!gen.origin.empty()) params.origin = to_vec3(gen.origin);
        if (!gen.sphere_center.empty())
            params.sphere_center = to_vec3(gen.sphere_center);
        if (!gen.emitter_min.empty())
            params.emitter.min() = to_vec3(gen.emitter_min);
        if (!gen.emitter_max.empty())
            params.emitter.max() = to_vec3(gen.emitter_max);

        Mesh target;
        if (preset == SynthPreset::Converge) {
            if (gen.mesh.empty())
                fail_input("the converge preset needs --mesh for its goal "
                           "surface");
            target = load_mesh(gen.mesh);
            params.target = &target;
        }

        const TrajectorySet ts = synthesize(preset, params, gen.seed);
        write_trajectories(gen.out, ts);
        std::printf("%zu samples over %zu particles\n", ts.sample_count(),
                    ts.particles.size());
        std::printf("wrote %s\n", gen.out.c_str());
    });

    // db
    DbArgs dba;
    CLI::App* cmd_db = app.add_subcommand(
        "db", "build and query descriptor databases");
    cmd_db->require_subcommand(1);

    CLI::App* db_build = cmd_db->add_subcommand(
        "build", "index a directory of .ild files into a manifest");
    db_build->add_option("--dir", dba.dir, "directory holding .ild files")
        ->required();
    db_build->add_option("--out", dba.out, "manifest path")->required();
    db_build->callback([&] {
        namespace fs = std::filesystem;
        std::vector<ManifestRow> rows = scan_descriptor_dir(dba.dir);
        if (rows.empty()) fail_input("no .ild files in " + dba.dir);
        const fs::path base = fs::absolute(fs::path(dba.out)).parent_path();
        for (ManifestRow& row : rows) {
            const fs::path full = fs::absolute(fs::path(dba.dir) / row.file);
            std::error_code ec;
            const fs::path rel = fs::relative(full, base, ec);
            row.file = (ec || rel.empty()) ? full.string() : rel.string();
            std::printf("%d\t%s\n", row.id,
                        row.label.empty() ? "(unlabeled)"
                                          : row.label.c_str());
        }
        write_db_manifest(dba.out, rows);
        std::printf("wrote %s (%zu entries)\n", dba.out.c_str(), rows.size());
    });

    CLI::App* db_retrieve = cmd_db->add_subcommand(
        "retrieve", "rank a database against a query descriptor");
    db_retrieve->add_option("--db", dba.manifest, "manifest path")
        ->required();
    db_retrieve->add_option("--query", dba.query, "query .ild")->required();
    db_retrieve->add_option("--top-k", dba.top_k, "matches to print");
    db_retrieve->add_option("--out", dba.csv, "recall,precision csv");
    db_retrieve->add_option("--weights", dba.weights,
                            "attribute weight file");
    db_retrieve->add_option("--variant", dba.variant,
                            "coefficient (default) or log");
    db_retrieve->callback([&] {
        const DescriptorDB db = load_db(dba.manifest);
        const RetrievalResult result =
            retrieve(db, load_descriptor(dba.query), dba.top_k,
                     weights_or_default(dba.weights),
                     variant_or_default(dba.variant));
        print_matches(result);
        write_pr_if_asked(dba.csv, result);
    });

    CLI::App* db_mds = cmd_db->add_subcommand(
        "mds", "embed the database's distance matrix into the plane");
    db_mds->add_option("--db", dba.manifest, "manifest path")->required();
    db_mds->add_option("--out", dba.out, "svg plot path")->required();
    db_mds->add_option("--csv", dba.csv, "also write id,label,x,y csv");
    db_mds->add_option("--matrix", dba.matrix,
                       "also write the distance matrix csv");
    db_mds->add_option("--weights", dba.weights, "attribute weight file");
    db_mds->add_option("--variant", dba.variant,
                       "coefficient (default) or log");
    db_mds->callback([&] {
        const DescriptorDB db = load_db(dba.manifest);
        const auto matrix = distance_matrix(db, weights_or_default(dba.weights),
                                            variant_or_default(dba.variant));
        const auto points = mds_embed(matrix);
        write_mds_svg(dba.out, db, points);
        std::printf("embedded %zu entries (flatness error %.6f)\n",
                    points.size(), mds_error(matrix, points));
        std::printf("wrote %s\n", dba.out.c_str());
        if (!dba.csv.empty()) {
            write_mds_csv(dba.csv, db, points);
            std::printf("wrote %s\n", dba.csv.c_str());
        }
        if (!dba.matrix.empty()) {
            write_distance_matrix_csv(dba.matrix, db, matrix);
            std::printf("wrote %s\n", dba.matrix.c_str());
        }
    });

    CLI::App* db_predict = cmd_db->add_subcommand(
        "predict", "rank by one stored segment against a partial query");
    db_predict->add_option("--db", dba.manifest, "manifest path")->required();
    db_predict
        ->add_option("--query", dba.query,
                     "query segment .ild (a partial-window encode)")
        ->required();
    db_predict->add_option("--k", dba.k, "1-based segment index");
    db_predict->add_option("--out", dba.csv, "recall,precision csv");
    db_predict->add_option("--weights", dba.weights,
                           "attribute weight file");
    db_predict->add_option("--variant", dba.variant,
                           "coefficient (default) or log");
    db_predict->callback([&] {
        const DescriptorDB db = load_db(dba.manifest);
        const RetrievalResult result =
            predict(db, load_descriptor(dba.query), dba.k,
                    weights_or_default(dba.weights),
                    variant_or_default(dba.variant));
        print_matches(result);
        write_pr_if_asked(dba.csv, result);
    });

    // saliency
    SaliencyArgs sal;
    CLI::App* cmd_saliency = app.add_subcommand(
        "saliency", "paint per-vertex interaction strength into an obj");
    cmd_saliency->add_option("--scene", sal.scene, "scene config file")
        ->required();
    cmd_saliency->add_option("--out", sal.out, "vertex-colored obj path")
        ->required();
    cmd_saliency->add_option("--csv", sal.csv, "also write vertex_id,saliency");
    cmd_saliency->add_option(
        "--radius", sal.radius,
        "neighborhood reach (default: the finest sensor edge)");
    cmd_saliency->add_option("--weights", sal.weights,
                             "attribute weight file");
    cmd_saliency->callback([&] {
        const PreparedScene scene = prepare_scene(load_scene_config(sal.scene));
        const EncodeResult encoded = encode_prepared(scene);
        const SaliencyMap map =
            scene_saliency(scene, encoded, sal.weights, sal.radius);
        write_saliency_obj(sal.out, scene.mesh, map);
        std::printf("saliency over %zu vertices (radius %.6g)\n",
                    map.values.size(), map.radius);
        std::printf("wrote %s\n", sal.out.c_str());
        if (!sal.csv.empty()) {
            write_saliency_csv(sal.csv, map);
            std::printf("wrote %s\n", sal.csv.c_str());
        }
    });

    // correspond
    CorrespondArgs cor;
    CLI::App* cmd_correspond = app.add_subcommand(
        "correspond", "match regions of two scenes by saliency");
    cmd_correspond->add_option("--scene-a", cor.scene_a, "first scene config")
        ->required();
    cmd_correspond->add_option("--scene-b", cor.scene_b, "second scene config")
        ->required();
    cmd_correspond->add_option("--out", cor.out, "match csv path")
        ->required();
    cmd_correspond->add_option("--grid", cor.grid,
                               "canonical grid resolution");
    cmd_correspond->add_option(
        "--radius", cor.radius,
        "saliency reach (default: each scene's finest sensor edge)");
    cmd_correspond->add_option("--weights", cor.weights,
                               "attribute weight file");
    cmd_correspond->callback([&] {
        const PreparedScene a = prepare_scene(load_scene_config(cor.scene_a));
        const EncodeResult ea = encode_prepared(a);
        const SaliencyMap ma = scene_saliency(a, ea, cor.weights, cor.radius);

        const PreparedScene b = prepare_scene(load_scene_config(cor.scene_b));
        const EncodeResult eb = encode_prepared(b);
        const SaliencyMap mb = scene_saliency(b, eb, cor.weights, cor.radius);

        const std::vector<RegionMatch> matches =
            correspondence(a.mesh, ma, b.mesh, mb, cor.grid);
        write_matches_csv(cor.out, matches);
        std::printf("%zu matched regions\n", matches.size());
        std::printf("wrote %s\n", cor.out.c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
