#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilscape/mesh.hpp"

namespace ilscape {

// Poisson-disk samples on a surface; every pair is more than min_spacing
// apart.
struct SurfaceSampleSet {
    std::vector<Vec3> points;
    std::vector<int> triangle; // source triangle per point
    double min_spacing = 0.0;
};

// Motion particles picked on a driver surface, with (triangle,
// barycentric) anchors into the source mesh for replay under animation.
struct DriverParticleSet {
    std::vector<Vec3> points;
    std::vector<int> anchor_triangle;
    std::vector<Vec3> anchor_bary;
};

// Per-vertex local feature size (distance to the medial axis) and the
// density rho = 1/lfs^2 derived from it.
struct LfsField {
    std::vector<double> lfs;
    std::vector<double> rho;
};

// Low-distortion map from two unit uniforms onto a triangle:
// (1-sqrt(r1))a + sqrt(r1)(1-r2)b + sqrt(r1)r2 c.
Vec3 sample_triangle_point(const Vec3& a, const Vec3& b, const Vec3& c,
                           double r1, double r2);

// Dart throwing with area-weighted triangle selection. A candidate is
// accepted only if it is farther than min_spacing from every accepted
// sample. Stops after 500 consecutive rejections or 200k samples.
SurfaceSampleSet poisson_disk_sample(const Mesh& mesh, double min_spacing,
                                     uint64_t rng_seed);

// Shrinking-ball medial axis approximation over vertex+normal pairs.
// Values are clamped to [1e-3, 1] x bbox diagonal; flat meshes fall back
// to a uniform field of one diagonal.
LfsField estimate_lfs(const Mesh& mesh);

// Saliency-scaled distance between a candidate and a placed sample p:
// the plain distance divided by lfs(p)^2.
double bilateral_distance(double d, double lfs_p);

// Greedy farthest-point sampling under bilateral_distance. Small regions
// (low lfs) inflate distances around them, so the greedy spread packs
// samples more densely there. Coarse meshes (< 200 vertices) are midpoint
// refined once before sampling.
DriverParticleSet bilateral_fps(const Mesh& driver_mesh, int count,
                                uint64_t rng_seed);

// Deterministic core of bilateral_fps: max-min selection over the given
// candidate positions starting from `first`, ties broken toward the
// lexicographically smallest position.
std::vector<int> bilateral_fps_indices(const std::vector<Vec3>& points,
                                       const std::vector<double>& rho,
                                       int count, int first);

void write_samples_csv(const std::string& path, const SurfaceSampleSet& set);
void write_particles_csv(const std::string& path,
                         const DriverParticleSet& set);

} // namespace ilscape
