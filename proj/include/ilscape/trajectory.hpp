#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilscape/geom.hpp"
#include "ilscape/mesh.hpp"

namespace ilscape {

// One observation of one motion particle.
struct TrajectorySample {
    int particle_id = 0;
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
};

// A particle's time-sorted samples on a constant dt grid.
struct ParticleTrack {
    int particle_id = 0;
    std::vector<double> t;
    std::vector<Vec3> position;
    std::vector<Vec3> velocity;
};

struct TrajectorySet {
    std::vector<ParticleTrack> particles; // sorted by particle_id
    double dt = 0.025;
    double duration = 0.0; // max t minus min t over all samples
    std::string label;

    size_t sample_count() const {
        size_t n = 0;
        for (const auto& p : particles) n += p.t.size();
        return n;
    }
};

// CSV with header particle_id,t,x,y,z and optional vx,vy,vz columns.
// Rows may arrive unsorted; dt is inferred as the median positive gap and
// every gap must agree with it within 1%. Velocities are taken verbatim
// when present, otherwise derived by finite differences.
TrajectorySet read_trajectories(const std::string& path);

void write_trajectories(const std::string& path, const TrajectorySet& ts);

// Central differences in the interior, one-sided at the ends; a single
// sample gets zero velocity.
TrajectorySet derive_velocities(const TrajectorySet& ts);

// Linear interpolation onto the absolute grid t = k*dt_new restricted to
// each particle's time span; velocities recomputed.
TrajectorySet resample(const TrajectorySet& ts, double dt_new);

// Samples with t in [t0, t1]; a particle with nothing left is dropped.
TrajectorySet clip_to_window(const TrajectorySet& ts, double t0, double t1);

enum class SynthPreset { Translate, Swirl, Source, Pour, Converge };

SynthPreset parse_preset(const std::string& name);
std::string preset_name(SynthPreset preset);

struct SynthParams {
    int particles = 2000;
    double duration = 1.0;
    double dt = 0.025;

    Box3 emitter{Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)};

    double speed = 1.0;             // translate
    Vec3 direction = Vec3::UnitX(); // translate

    Vec3 axis = Vec3::UnitZ();  // swirl: angular velocity vector
    Vec3 origin = Vec3::Zero(); // swirl and source center

    double rate = 1.0; // source: v = rate * (x - origin)

    double floor_z = 0.0; // pour: inelastic stop height

    Vec3 sphere_center = Vec3(0, 0, 2); // converge start sphere
    double sphere_radius = 1.0;
    const Mesh* target = nullptr; // converge goal surface
};

// Closed-form motions sampled on the dt grid; every preset stores the
// exact analytic velocity of its path. Deterministic given the seed.
TrajectorySet synthesize(SynthPreset preset, const SynthParams& params,
                         uint64_t seed);

} // namespace ilscape
