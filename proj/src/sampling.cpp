#include "ilscape/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "ilscape/error.hpp"
#include "ilscape/kd_tree.hpp"
#include "ilscape/rng.hpp"

namespace ilscape {

Vec3 sample_triangle_point(const Vec3& a, const Vec3& b, const Vec3& c,
                           double r1, double r2) {
    if (r1 < 0.0 || r1 > 1.0 || r2 < 0.0 || r2 > 1.0) {
        fail_input("triangle sampling needs r1, r2 in [0,1]");
    }
    const double s = std::sqrt(r1);
    return (1.0 - s) * a + s * (1.0 - r2) * b + s * r2 * c;
}

namespace {

constexpr int kPoissonRejectionBudget = 500;
constexpr size_t kPoissonSampleCap = 200000;

// Grid cells are keyed by packed integer coordinates; the cell edge
// equals min_spacing so conflicts can only sit in the 27 surrounding
// cells.
struct CellIndex {
    int64_t x, y, z;
};

CellIndex cell_of(const Vec3& p, const Vec3& origin, double cell) {
    return {static_cast<int64_t>(std::floor((p.x() - origin.x()) / cell)),
            static_cast<int64_t>(std::floor((p.y() - origin.y()) / cell)),
            static_cast<int64_t>(std::floor((p.z() - origin.z()) / cell))};
}

uint64_t cell_key(const CellIndex& c) {
    const auto comp = [](int64_t v) {
        return static_cast<uint64_t>(v + (1ll << 20));
    };
    return comp(c.x) | (comp(c.y) << 21) | (comp(c.z) << 42);
}

} // namespace

SurfaceSampleSet poisson_disk_sample(const Mesh& mesh, double min_spacing,
                                     uint64_t rng_seed) {
    if (!(min_spacing > 0.0)) fail_input("min_spacing must be positive");

    std::vector<double> cdf(mesh.triangles.size());
    double total = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        total += triangle_area(mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                               mesh.vertices[tr[2]]);
        cdf[t] = total;
    }
    if (!(total > 0.0)) fail_input("mesh has zero surface area");

    Rng rng(rng_seed);
    auto draw = [&](Vec3& p, int& tri) {
        const double u = rng.uniform() * total;
        const size_t t = std::min(
            static_cast<size_t>(
                std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
            cdf.size() - 1);
        const auto& tr = mesh.triangles[t];
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        p = sample_triangle_point(mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                                  mesh.vertices[tr[2]], r1, r2);
        tri = static_cast<int>(t);
    };

    SurfaceSampleSet set;
    set.min_spacing = min_spacing;

    const double diag = mesh.bounds.diagonal().norm();
    if (min_spacing > diag) {
        warn("sample spacing exceeds the mesh diagonal; emitting one sample");
        Vec3 p;
        int tri;
        draw(p, tri);
        set.points.push_back(p);
        set.triangle.push_back(tri);
        return set;
    }

    const Vec3 origin = mesh.bounds.min();
    std::unordered_map<uint64_t, std::vector<int>> grid;
    const double spacing2 = min_spacing * min_spacing;

    int rejections = 0;
    while (rejections < kPoissonRejectionBudget &&
           set.points.size() < kPoissonSampleCap) {
        Vec3 p;
        int tri;
        draw(p, tri);

        bool accept = true;
        const CellIndex center = cell_of(p, origin, min_spacing);
        for (int64_t dz = -1; dz <= 1 && accept; ++dz) {
            for (int64_t dy = -1; dy <= 1 && accept; ++dy) {
                for (int64_t dx = -1; dx <= 1 && accept; ++dx) {
                    const auto it = grid.find(cell_key(
                        {center.x + dx, center.y + dy, center.z + dz}));
                    if (it == grid.end()) continue;
                    for (const int j : it->second) {
                        if ((set.points[j] - p).squaredNorm() <= spacing2) {
                            accept = false;
                            break;
                        }
                    }
                }
            }
        }

        if (!accept) {
            ++rejections;
            continue;
        }
        rejections = 0;
        grid[cell_key(center)].push_back(static_cast<int>(set.points.size()));
        set.points.push_back(p);
        set.triangle.push_back(tri);
    }
    return set;
}

LfsField estimate_lfs(const Mesh& mesh) {
    const size_t n = mesh.vertices.size();
    const double diag = mesh.bounds.diagonal().norm();
    const double lfs_min = 1e-3 * diag;

    LfsField field;
    field.lfs.assign(n, diag);

    // Flat input has no interior medial axis; keep the uniform fallback.
    bool degenerate = n < 4 || !(diag > 0.0);
    if (!degenerate) {
        Vec3 mean = Vec3::Zero();
        for (const auto& v : mesh.vertices) mean += v;
        mean /= static_cast<double>(n);
        Mat3 cov = Mat3::Zero();
        for (const auto& v : mesh.vertices) {
            const Vec3 d = v - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        degenerate = std::sqrt(std::max(0.0, eig.eigenvalues()[0])) <
                     1e-8 * diag;
    }
    if (degenerate) {
        warn("mesh is flat or degenerate; using uniform feature size");
        field.rho.assign(n, 1.0 / (diag * diag));
        return field;
    }

    const PointKdTree tree(mesh.vertices);
    const double edge_threshold = 1e-6 * diag;
    const double tolerance = 1e-4 * diag;

    for (size_t i = 0; i < n; ++i) {
        const Vec3& p = mesh.vertices[i];
        const Vec3& nrm = mesh.vertex_normals[i];

        // Shrink a ball tangent at p toward the inside until no other
        // vertex lies strictly within it; its final radius approximates
        // the distance to the medial axis.
        double r = 0.5 * diag;
        for (int iter = 0; iter < 64; ++iter) {
            const Vec3 center = p - r * nrm;
            double dist = 0.0;
            const int j =
                tree.nearest_excluding(center, p, edge_threshold, &dist);
            if (j < 0 || dist >= r * (1.0 - 1e-9)) break;
            const Vec3& q = mesh.vertices[j];
            const double denom = 2.0 * nrm.dot(p - q);
            if (denom <= 1e-300) break;
            const double next = (p - q).squaredNorm() / denom;
            if (!std::isfinite(next) || next <= 0.0) break;
            const bool done = std::abs(r - next) < tolerance;
            r = next;
            if (done) break;
        }
        field.lfs[i] = std::clamp(r, lfs_min, diag);
    }

    field.rho.resize(n);
    for (size_t i = 0; i < n; ++i) {
        field.rho[i] = 1.0 / (field.lfs[i] * field.lfs[i]);
    }
    return field;
}

double bilateral_distance(double d, double lfs_p) {
    return d / (lfs_p * lfs_p);
}

std::vector<int> bilateral_fps_indices(const std::vector<Vec3>& points,
                                       const std::vector<double>& rho,
                                       int count, int first) {
    const int n = static_cast<int>(points.size());
    if (n == 0 || count < 1) fail_internal("farthest-point sampling on empty input");
    if (first < 0 || first >= n) fail_internal("seed vertex out of range");
    count = std::min(count, n);

    std::vector<int> picked;
    picked.reserve(count);
    std::vector<char> used(n, 0);
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());

    int current = first;
    picked.push_back(current);
    used[current] = 1;

    while (static_cast<int>(picked.size()) < count) {
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            const double d =
                (points[v] - points[current]).norm() * rho[current];
            mind[v] = std::min(mind[v], d);
        }
        int best = -1;
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            if (best < 0 || mind[v] > mind[best] ||
                (mind[v] == mind[best] && lex_less(points[v], points[best]))) {
                best = v;
            }
        }
        current = best;
        picked.push_back(current);
        used[current] = 1;
    }
    return picked;
}

DriverParticleSet bilateral_fps(const Mesh& driver_mesh, int count,
                                uint64_t rng_seed) {
    if (count < 1) fail_input("particle count must be at least 1");

    // Coarse drivers give the greedy selection too few candidates; one
    // refinement pass keeps the anchors exact while densifying.
    RefinedMesh refined;
    const Mesh* m = &driver_mesh;
    std::vector<int> atri;
    std::vector<Vec3> abary;
    if (driver_mesh.vertices.size() < 200) {
        refined = subdivide_midpoint(driver_mesh);
        m = &refined.mesh;
        atri = std::move(refined.anchor_triangle);
        abary = std::move(refined.anchor_bary);
    } else {
        vertex_anchors(driver_mesh, atri, abary);
    }

    const int n = static_cast<int>(m->vertices.size());
    if (count > n) {
        warn("requested " + std::to_string(count) +
             " particles from a driver with " + std::to_string(n) +
             " candidate vertices; returning all of them");
        count = n;
    }

    const LfsField lfs = estimate_lfs(*m);
    Rng rng(rng_seed);
    const int first = static_cast<int>(rng.uniform_index(n));
    const auto idx = bilateral_fps_indices(m->vertices, lfs.rho, count, first);

    DriverParticleSet set;
    set.points.reserve(idx.size());
    set.anchor_triangle.reserve(idx.size());
    set.anchor_bary.reserve(idx.size());
    for (const int v : idx) {
        set.points.push_back(m->vertices[v]);
        set.anchor_triangle.push_back(atri[v]);
        set.anchor_bary.push_back(abary[v]);
    }
    return set;
}

namespace {

void write_point_rows(std::ofstream& out, const std::vector<Vec3>& points,
                      const std::vector<int>& tri) {
    char buf[160];
    for (size_t i = 0; i < points.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%d\n", i,
                      points[i].x(), points[i].y(), points[i].z(), tri[i]);
        out << buf;
    }
}

} // namespace

void write_samples_csv(const std::string& path, const SurfaceSampleSet& set) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "id,x,y,z,tri_index\n";
    write_point_rows(out, set.points, set.triangle);
}

void write_particles_csv(const std::string& path,
                         const DriverParticleSet& set) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "id,x,y,z,tri_index\n";
    write_point_rows(out, set.points, set.anchor_triangle);
}

} // namespace ilscape
