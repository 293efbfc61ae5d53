#include "ilscape/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ilscape/aabb_tree.hpp"
#include "ilscape/error.hpp"
#include "ilscape/rng.hpp"

namespace ilscape {

namespace {

void recompute_duration(TrajectorySet& ts) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : ts.particles) {
        if (p.t.empty()) continue;
        lo = std::min(lo, p.t.front());
        hi = std::max(hi, p.t.back());
    }
    ts.duration = hi > lo ? hi - lo : 0.0;
}

std::vector<double> split_numbers(const std::string& line, size_t line_no,
                                  const std::string& path) {
    std::vector<double> out;
    size_t begin = 0;
    while (begin <= line.size()) {
        size_t end = line.find(',', begin);
        if (end == std::string::npos) end = line.size();
        const std::string tok = line.substr(begin, end - begin);
        char* stop = nullptr;
        const double v = std::strtod(tok.c_str(), &stop);
        if (stop == tok.c_str()) {
            fail_input(path + ":" + std::to_string(line_no) +
                       ": expected a number, got '" + tok + "'");
        }
        if (!std::isfinite(v)) {
            fail_input(path + ":" + std::to_string(line_no) +
                       ": non-finite value '" + tok + "'");
        }
        out.push_back(v);
        begin = end + 1;
        if (end == line.size()) break;
    }
    return out;
}

} // namespace

TrajectorySet read_trajectories(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_input("cannot open trajectory file: " + path);

    std::string header;
    if (!std::getline(in, header)) fail_input(path + ": empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    bool with_velocity = false;
    if (header == "particle_id,t,x,y,z") {
        with_velocity = false;
    } else if (header == "particle_id,t,x,y,z,vx,vy,vz") {
        with_velocity = true;
    } else {
        fail_input(path + ": unrecognized header '" + header + "'");
    }
    const size_t columns = with_velocity ? 8 : 5;

    std::map<int, ParticleTrack> tracks;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto v = split_numbers(line, line_no, path);
        if (v.size() != columns) {
            fail_input(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " columns, got " +
                       std::to_string(v.size()));
        }
        if (v[1] < 0) {
            fail_input(path + ":" + std::to_string(line_no) +
                       ": negative timestamp");
        }
        const int id = static_cast<int>(v[0]);
        auto& track = tracks[id];
        track.particle_id = id;
        track.t.push_back(v[1]);
        track.position.emplace_back(v[2], v[3], v[4]);
        track.velocity.emplace_back(with_velocity ? Vec3(v[5], v[6], v[7])
                                                  : Vec3::Zero());
    }

    TrajectorySet ts;
    for (auto& [id, track] : tracks) {
        std::vector<size_t> order(track.t.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return track.t[a] < track.t[b];
        });
        ParticleTrack sorted;
        sorted.particle_id = id;
        for (const size_t i : order) {
            sorted.t.push_back(track.t[i]);
            sorted.position.push_back(track.position[i]);
            sorted.velocity.push_back(track.velocity[i]);
        }
        ts.particles.push_back(std::move(sorted));
    }

    // dt = median positive gap, then every gap must sit within 1% of it.
    std::vector<double> gaps;
    for (const auto& p : ts.particles) {
        for (size_t k = 1; k < p.t.size(); ++k) {
            const double g = p.t[k] - p.t[k - 1];
            if (g > 0) gaps.push_back(g);
        }
    }
    if (gaps.empty()) {
        warn(path + ": no time steps to infer dt from; keeping default " +
             std::to_string(ts.dt));
    } else {
        std::sort(gaps.begin(), gaps.end());
        ts.dt = gaps[gaps.size() / 2];
        for (const auto& p : ts.particles) {
            for (size_t k = 1; k < p.t.size(); ++k) {
                const double g = p.t[k] - p.t[k - 1];
                if (std::abs(g - ts.dt) > 0.01 * ts.dt) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf),
                                  "%s: particle %d at t=%.9g: time step %.9g "
                                  "deviates from dt=%.9g",
                                  path.c_str(), p.particle_id, p.t[k], g,
                                  ts.dt);
                    fail_input(buf);
                }
            }
        }
    }

    recompute_duration(ts);
    if (!with_velocity) return derive_velocities(ts);
    return ts;
}

void write_trajectories(const std::string& path, const TrajectorySet& ts) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "particle_id,t,x,y,z,vx,vy,vz\n";
    char buf[256];
    for (const auto& p : ts.particles) {
        for (size_t k = 0; k < p.t.size(); ++k) {
            std::snprintf(buf, sizeof(buf),
                          "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          p.particle_id, p.t[k], p.position[k].x(),
                          p.position[k].y(), p.position[k].z(),
                          p.velocity[k].x(), p.velocity[k].y(),
                          p.velocity[k].z());
            out << buf;
        }
    }
}

TrajectorySet derive_velocities(const TrajectorySet& ts) {
    TrajectorySet out = ts;
    for (auto& p : out.particles) {
        const size_t n = p.t.size();
        p.velocity.assign(n, Vec3::Zero());
        if (n < 2) continue;
        for (size_t k = 0; k < n; ++k) {
            const size_t lo = k > 0 ? k - 1 : 0;
            const size_t hi = k + 1 < n ? k + 1 : n - 1;
            const double span = p.t[hi] - p.t[lo];
            if (span > 0) {
                p.velocity[k] = (p.position[hi] - p.position[lo]) / span;
            }
        }
    }
    return out;
}

TrajectorySet resample(const TrajectorySet& ts, double dt_new) {
    if (!(dt_new > 0)) fail_input("resampling step must be positive");

    TrajectorySet out;
    out.dt = dt_new;
    out.label = ts.label;
    const double eps = 1e-9 * dt_new;

    for (const auto& p : ts.particles) {
        if (p.t.empty()) continue;
        ParticleTrack track;
        track.particle_id = p.particle_id;

        const int64_t k0 =
            static_cast<int64_t>(std::ceil((p.t.front() - eps) / dt_new));
        const int64_t k1 =
            static_cast<int64_t>(std::floor((p.t.back() + eps) / dt_new));
        size_t seg = 0;
        for (int64_t k = k0; k <= k1; ++k) {
            const double t = k * dt_new;
            while (seg + 2 < p.t.size() && p.t[seg + 1] < t) ++seg;
            const double span = p.t[seg + 1 < p.t.size() ? seg + 1 : seg] -
                                p.t[seg];
            double a = 0.0;
            if (span > 0) {
                a = std::clamp((t - p.t[seg]) / span, 0.0, 1.0);
            }
            const Vec3 pos =
                seg + 1 < p.t.size()
                    ? Vec3((1 - a) * p.position[seg] + a * p.position[seg + 1])
                    : p.position[seg];
            track.t.push_back(t);
            track.position.push_back(pos);
            track.velocity.push_back(Vec3::Zero());
        }
        if (!track.t.empty()) out.particles.push_back(std::move(track));
    }
    recompute_duration(out);
    return derive_velocities(out);
}

TrajectorySet clip_to_window(const TrajectorySet& ts, double t0, double t1) {
    if (t0 < 0 || !(t0 < t1)) {
        fail_input("clip window needs 0 <= t0 < t1");
    }
    TrajectorySet out;
    out.dt = ts.dt;
    out.label = ts.label;
    for (const auto& p : ts.particles) {
        ParticleTrack track;
        track.particle_id = p.particle_id;
        for (size_t k = 0; k < p.t.size(); ++k) {
            if (p.t[k] < t0 || p.t[k] > t1) continue;
            track.t.push_back(p.t[k]);
            track.position.push_back(p.position[k]);
            track.velocity.push_back(p.velocity[k]);
        }
        if (!track.t.empty()) out.particles.push_back(std::move(track));
    }
    recompute_duration(out);
    return out;
}

SynthPreset parse_preset(const std::string& name) {
    if (name == "translate") return SynthPreset::Translate;
    if (name == "swirl") return SynthPreset::Swirl;
    if (name == "source") return SynthPreset::Source;
    if (name == "pour") return SynthPreset::Pour;
    if (name == "converge") return SynthPreset::Converge;
    fail_input("unknown motion preset '" + name + "'");
}

std::string preset_name(SynthPreset preset) {
    switch (preset) {
        case SynthPreset::Translate: return "translate";
        case SynthPreset::Swirl: return "swirl";
        case SynthPreset::Source: return "source";
        case SynthPreset::Pour: return "pour";
        case SynthPreset::Converge: return "converge";
    }
    fail_internal("unhandled preset");
}

TrajectorySet synthesize(SynthPreset preset, const SynthParams& params,
                         uint64_t seed) {
    if (params.particles <= 0) fail_input("particle count must be positive");
    if (!(params.duration > 0)) fail_input("duration must be positive");
    if (!(params.dt > 0)) fail_input("dt must be positive");

    const int steps =
        static_cast<int>(std::floor(params.duration / params.dt + 1e-9)) + 1;

    Rng rng(seed);
    const AabbTree* target_tree = nullptr;
    AabbTree tree_storage;
    if (preset == SynthPreset::Converge) {
        if (!params.target) fail_input("converge preset needs a target mesh");
        tree_storage = AabbTree(*params.target);
        target_tree = &tree_storage;
    }

    TrajectorySet ts;
    ts.dt = params.dt;
    ts.label = preset_name(preset);
    ts.particles.resize(params.particles);

    const double g = 9.81;
    for (int i = 0; i < params.particles; ++i) {
        ParticleTrack& track = ts.particles[i];
        track.particle_id = i;
        track.t.resize(steps);
        track.position.resize(steps);
        track.velocity.resize(steps);

        Vec3 start;
        Vec3 goal = Vec3::Zero();
        if (preset == SynthPreset::Converge) {
            start = params.sphere_center +
                    params.sphere_radius * rng.on_unit_sphere();
            goal = target_tree->closest(start).point;
        } else {
            start = rng.in_box(params.emitter);
        }

        for (int k = 0; k < steps; ++k) {
            const double t = k * params.dt;
            track.t[k] = t;
            Vec3 pos, vel;
            switch (preset) {
                case SynthPreset::Translate: {
                    const Vec3 v = params.speed * params.direction.normalized();
                    pos = start + t * v;
                    vel = v;
                    break;
                }
                case SynthPreset::Swirl: {
                    const double w = params.axis.norm();
                    const Vec3 r = start - params.origin;
                    if (w > 0) {
                        const Eigen::AngleAxisd rot(w * t,
                                                    params.axis / w);
                        pos = params.origin + rot * r;
                    } else {
                        pos = start;
                    }
                    vel = params.axis.cross(pos - params.origin);
                    break;
                }
                case SynthPreset::Source: {
                    const double s = std::exp(params.rate * t);
                    pos = params.origin + s * (start - params.origin);
                    vel = params.rate * (pos - params.origin);
                    break;
                }
                case SynthPreset::Pour: {
                    // Free fall from rest, stopping dead on the floor.
                    const double drop = start.z() - params.floor_z;
                    const double t_hit =
                        drop > 0 ? std::sqrt(2.0 * drop / g)
                                 : 0.0;
                    if (t < t_hit) {
                        pos = start - Vec3(0, 0, 0.5 * g * t * t);
                        vel = Vec3(0, 0, -g * t);
                    } else {
                        pos = Vec3(start.x(), start.y(), params.floor_z);
                        vel = Vec3::Zero();
                    }
                    break;
                }
                case SynthPreset::Converge: {
                    // Quadratic ease-out: arrives at the goal with zero
                    // speed exactly at t = duration.
                    const double tau =
                        std::min(t / params.duration, 1.0);
                    const double blend = 1.0 - (1.0 - tau) * (1.0 - tau);
                    pos = start + blend * (goal - start);
                    vel = (goal - start) *
                          (2.0 * (1.0 - tau) / params.duration);
                    break;
                }
            }
            track.position[k] = pos;
            track.velocity[k] = vel;
        }
    }
    recompute_duration(ts);
    return ts;
}

} // namespace ilscape
