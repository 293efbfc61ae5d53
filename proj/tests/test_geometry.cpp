#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "ilscape/aabb_tree.hpp"
#include "ilscape/error.hpp"
#include "ilscape/mesh.hpp"
#include "ilscape/rng.hpp"
#include "ilscape/sampling.hpp"
#include "test_shapes.hpp"

using namespace ilscape;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

// Independent closest-point oracle: plane projection with barycentric
// acceptance, otherwise the best of the three edges. Deliberately a
// different construction than the library's Voronoi-region walk.
Vec3 oracle_closest_on_triangle(const Vec3& q, const Vec3& a, const Vec3& b,
                                const Vec3& c) {
    Vec3 best = a;
    double best_d2 = (q - a).squaredNorm();

    const Vec3 n = (b - a).cross(c - a);
    const double n2 = n.squaredNorm();
    if (n2 > 0) {
        const Vec3 proj = q - n * (n.dot(q - a) / n2);
        const double inv = 1.0 / n2;
        const double u = (b - proj).cross(c - proj).dot(n) * inv;
        const double v = (c - proj).cross(a - proj).dot(n) * inv;
        const double w = 1.0 - u - v;
        if (u >= 0 && v >= 0 && w >= 0) {
            const double d2 = (q - proj).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = proj;
            }
        }
    }
    const Vec3 corners[3] = {a, b, c};
    for (int e = 0; e < 3; ++e) {
        const Vec3& s0 = corners[e];
        const Vec3& s1 = corners[(e + 1) % 3];
        const Vec3 d = s1 - s0;
        const double len2 = d.squaredNorm();
        const double t =
            len2 > 0 ? std::clamp((q - s0).dot(d) / len2, 0.0, 1.0) : 0.0;
        const Vec3 p = s0 + t * d;
        const double d2 = (q - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = p;
        }
    }
    return best;
}

Vec3 oracle_closest_on_mesh(const Mesh& m, const Vec3& q) {
    Vec3 best = Vec3::Zero();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& t : m.triangles) {
        const Vec3 p = oracle_closest_on_triangle(
            q, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        const double d2 = (q - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = p;
        }
    }
    return best;
}

} // namespace

TEST_CASE("load_mesh reads a cube and computes bounds and unit normals") {
    const auto path = write_temp(
        "cube.obj",
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\n"
        "v 0 0 1\nv 1 0 1\nv 0 1 1\nv 1 1 1\n"
        "f 1 3 2\nf 2 3 4\nf 5 6 7\nf 6 8 7\n"
        "f 1 2 5\nf 2 6 5\nf 3 7 4\nf 4 7 8\n"
        "f 1 5 3\nf 3 5 7\nf 2 4 6\nf 4 8 6\n");
    const Mesh m = load_mesh(path);
    CHECK(m.vertices.size() == 8);
    CHECK(m.triangles.size() == 12);
    CHECK(m.bounds.min().isApprox(Vec3(0, 0, 0)));
    CHECK(m.bounds.max().isApprox(Vec3(1, 1, 1)));
    for (const auto& n : m.vertex_normals) {
        CHECK(std::abs(n.norm() - 1.0) < 1e-6);
    }
}

TEST_CASE("load_mesh fan-triangulates quad faces") {
    const auto path = write_temp(
        "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const Mesh m = load_mesh(path);
    CHECK(m.triangles.size() == 2);
}

TEST_CASE("load_mesh accepts slash face syntax and vertex colors") {
    const auto path = write_temp(
        "slash.obj",
        "v 0 0 0 0.2 0.4 0.6\nv 1 0 0 1 0 0\nv 0 1 0 0 1 0\n"
        "vn 0 0 1\nf 1//1 2//1 3//1\n");
    const Mesh m = load_mesh(path);
    CHECK(m.triangles.size() == 1);
    CHECK(m.vertices[1].isApprox(Vec3(1, 0, 0)));
}

TEST_CASE("load_mesh error cases are distinct") {
    CHECK_THROWS_WITH_AS(load_mesh("/tmp/does_not_exist_ils.obj"),
                         doctest::Contains("cannot open"), Error);

    const auto empty = write_temp("empty.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n");
    CHECK_THROWS_WITH_AS(load_mesh(empty), doctest::Contains("zero triangles"),
                         Error);

    const auto nan_obj =
        write_temp("nan.obj", "v 0 0 nan\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK_THROWS_WITH_AS(load_mesh(nan_obj), doctest::Contains("non-finite"),
                         Error);

    const auto bad_idx =
        write_temp("badidx.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    CHECK_THROWS_AS(load_mesh(bad_idx), Error);
}

TEST_CASE("sample_triangle_point hits the corners at extreme inputs") {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    CHECK(sample_triangle_point(a, b, c, 0.0, 0.7).isApprox(a));
    CHECK(sample_triangle_point(a, b, c, 1.0, 0.0).isApprox(b));
    CHECK(sample_triangle_point(a, b, c, 1.0, 1.0).isApprox(c));
}

TEST_CASE("sample_triangle_point stays inside the triangle") {
    const Vec3 a(0.3, -1.0, 2.0), b(4.0, 0.5, -1.0), c(-2.0, 3.0, 0.5);
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        const Vec3 p = sample_triangle_point(a, b, c, r1, r2);

        // Recover barycentric coordinates and demand a convex combination.
        const Vec3 ab = b - a, ac = c - a, ap = p - a;
        const double d00 = ab.dot(ab), d01 = ab.dot(ac), d11 = ac.dot(ac);
        const double d20 = ap.dot(ab), d21 = ap.dot(ac);
        const double denom = d00 * d11 - d01 * d01;
        const double v = (d11 * d20 - d01 * d21) / denom;
        const double w = (d00 * d21 - d01 * d20) / denom;
        const double u = 1.0 - v - w;
        CHECK(u >= -1e-12);
        CHECK(v >= -1e-12);
        CHECK(w >= -1e-12);
        CHECK(u + v + w == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(sample_triangle_point(a, b, c, -0.1, 0.5), Error);
    CHECK_THROWS_AS(sample_triangle_point(a, b, c, 0.5, 1.1), Error);
}

TEST_CASE("poisson_disk_sample spacing, determinism, degenerate spacing") {
    const Mesh cube = shapes::unit_cube();
    const double c = 0.1;
    const auto set = poisson_disk_sample(cube, c, 42);
    REQUIRE(set.points.size() > 50);

    for (size_t i = 0; i < set.points.size(); ++i) {
        for (size_t j = i + 1; j < set.points.size(); ++j) {
            CHECK((set.points[i] - set.points[j]).norm() > c);
        }
    }

    // Every sample lies on its source triangle.
    for (size_t i = 0; i < set.points.size(); ++i) {
        const auto& t = cube.triangles[set.triangle[i]];
        const Vec3 p = oracle_closest_on_triangle(
            set.points[i], cube.vertices[t[0]], cube.vertices[t[1]],
            cube.vertices[t[2]]);
        CHECK((p - set.points[i]).norm() < 1e-6);
    }

    const auto again = poisson_disk_sample(cube, c, 42);
    REQUIRE(again.points.size() == set.points.size());
    for (size_t i = 0; i < set.points.size(); ++i) {
        CHECK(again.points[i] == set.points[i]);
        CHECK(again.triangle[i] == set.triangle[i]);
    }

    const auto lone = poisson_disk_sample(cube, 10.0, 1);
    CHECK(lone.points.size() == 1);

    CHECK_THROWS_AS(poisson_disk_sample(cube, 0.0, 1), Error);
}

TEST_CASE("estimate_lfs recovers the radius of a sphere") {
    const Mesh sphere = shapes::icosphere(1.0, 3);
    const LfsField f = estimate_lfs(sphere);
    REQUIRE(f.lfs.size() == sphere.vertices.size());
    for (const double v : f.lfs) {
        CHECK(v == doctest::Approx(1.0).epsilon(0.10));
    }
}

TEST_CASE("estimate_lfs recovers the radius on a capsule body") {
    const double radius = 0.4;
    const double len = 6.0;
    const Mesh cap = shapes::capsule(radius, len);
    const LfsField f = estimate_lfs(cap);
    int checked = 0;
    for (size_t i = 0; i < cap.vertices.size(); ++i) {
        if (std::abs(cap.vertices[i].z()) > len / 2 - radius) continue;
        ++checked;
        CHECK(f.lfs[i] == doctest::Approx(radius).epsilon(0.15));
    }
    CHECK(checked > 50);
}

TEST_CASE("estimate_lfs falls back to a uniform field on flat meshes") {
    const Mesh plane = shapes::plane_grid(8);
    const LfsField f = estimate_lfs(plane);
    const double diag = plane.bounds.diagonal().norm();
    for (const double v : f.lfs) CHECK(v == diag);
}

TEST_CASE("estimate_lfs stays positive and finite everywhere") {
    for (const Mesh& m : {shapes::unit_cube(), shapes::dumbbell()}) {
        const double diag = m.bounds.diagonal().norm();
        const LfsField f = estimate_lfs(m);
        for (size_t i = 0; i < f.lfs.size(); ++i) {
            CHECK(f.lfs[i] >= 1e-3 * diag);
            CHECK(f.lfs[i] <= diag);
            CHECK(std::isfinite(f.rho[i]));
        }
    }
}

TEST_CASE("bilateral_distance matches direct substitution") {
    CHECK(bilateral_distance(2.0, 0.5) == doctest::Approx(8.0));
}

TEST_CASE("bilateral_fps count=1 returns exactly the seed vertex") {
    const Mesh sphere = shapes::icosphere(1.0, 2);
    std::vector<double> rho(sphere.vertices.size(), 1.0);
    const auto idx = bilateral_fps_indices(sphere.vertices, rho, 1, 17);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == 17);
}

TEST_CASE("bilateral_fps over-represents small features vs plain spread") {
    const Mesh bell = shapes::dumbbell();
    const LfsField f = estimate_lfs(bell);
    const std::vector<double> uniform(bell.vertices.size(), 1.0);

    const int m = 120;
    const int first = 0; // same start for both runs
    const auto biased = bilateral_fps_indices(bell.vertices, f.rho, m, first);
    const auto plain = bilateral_fps_indices(bell.vertices, uniform, m, first);

    auto handle_count = [&](const std::vector<int>& idx) {
        int k = 0;
        for (const int v : idx) {
            if (std::abs(bell.vertices[v].x()) < 1.2) ++k;
        }
        return k;
    };
    CHECK(handle_count(biased) > handle_count(plain));
}

TEST_CASE("bilateral_fps selection is stable under vertex permutation") {
    const Mesh sphere = shapes::icosphere(1.0, 2);
    const size_t n = sphere.vertices.size();
    const LfsField f = estimate_lfs(sphere);

    // Deterministic shuffle of vertex order.
    std::vector<int> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    Rng rng(5);
    for (size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    }
    std::vector<Vec3> shuffled(n);
    std::vector<double> rho_shuffled(n);
    std::vector<int> where(n);
    for (size_t i = 0; i < n; ++i) {
        shuffled[perm[i]] = sphere.vertices[i];
        rho_shuffled[perm[i]] = f.rho[i];
        where[i] = perm[i];
    }

    const int first = 3;
    const auto a = bilateral_fps_indices(sphere.vertices, f.rho, 40, first);
    const auto b =
        bilateral_fps_indices(shuffled, rho_shuffled, 40, where[first]);

    auto key = [](const Vec3& p) {
        return std::array<double, 3>{p.x(), p.y(), p.z()};
    };
    std::set<std::array<double, 3>> sa, sb;
    for (const int i : a) sa.insert(key(sphere.vertices[i]));
    for (const int i : b) sb.insert(key(shuffled[i]));
    CHECK(sa == sb);
}

TEST_CASE("bilateral_fps refines coarse drivers and anchors are exact") {
    const Mesh cube = shapes::unit_cube();
    const auto set = bilateral_fps(cube, 20, 9);
    REQUIRE(set.points.size() == 20);
    for (size_t i = 0; i < set.points.size(); ++i) {
        REQUIRE(set.anchor_triangle[i] >= 0);
        const auto& t = cube.triangles[set.anchor_triangle[i]];
        const Vec3 replay = set.anchor_bary[i][0] * cube.vertices[t[0]] +
                            set.anchor_bary[i][1] * cube.vertices[t[1]] +
                            set.anchor_bary[i][2] * cube.vertices[t[2]];
        CHECK((replay - set.points[i]).norm() < 1e-12);
    }

    // More particles than candidates: clamps with all vertices.
    const auto all = bilateral_fps(cube, 100000, 9);
    CHECK(all.points.size() == 26); // 8 + 18 edge midpoints after refinement
}

TEST_CASE("subdivide_midpoint splits 4:1 and dedupes edge midpoints") {
    const Mesh cube = shapes::unit_cube();
    const RefinedMesh r = subdivide_midpoint(cube);
    CHECK(r.mesh.triangles.size() == 48);
    CHECK(r.mesh.vertices.size() == 26);
    for (size_t i = 0; i < r.mesh.vertices.size(); ++i) {
        const auto& t = cube.triangles[r.anchor_triangle[i]];
        const Vec3 replay = r.anchor_bary[i][0] * cube.vertices[t[0]] +
                            r.anchor_bary[i][1] * cube.vertices[t[1]] +
                            r.anchor_bary[i][2] * cube.vertices[t[2]];
        CHECK((replay - r.mesh.vertices[i]).norm() < 1e-12);
    }
}

TEST_CASE("closest point on a quad over a plane") {
    const Mesh quad = shapes::unit_quad();
    const AabbTree tree(quad);

    const SurfaceHit hit = tree.closest(Vec3(0.5, 0.5, 1.0));
    CHECK(hit.point.isApprox(Vec3(0.5, 0.5, 0.0)));
    CHECK(hit.distance == doctest::Approx(1.0));
    CHECK(hit.normal.isApprox(Vec3(0, 0, 1)));

    const SurfaceHit on = tree.closest(Vec3(0.25, 0.75, 0.0));
    CHECK(on.distance == doctest::Approx(0.0));
}

TEST_CASE("closest point agrees with the brute-force oracle") {
    const Mesh sphere = shapes::icosphere(1.0, 2);
    const AabbTree tree(sphere);
    Rng rng(11);
    const Box3 domain(Vec3(-2, -2, -2), Vec3(2, 2, 2));
    for (int i = 0; i < 10000; ++i) {
        const Vec3 q = rng.in_box(domain);
        const SurfaceHit hit = tree.closest(q);
        const Vec3 want = oracle_closest_on_mesh(sphere, q);
        CHECK((hit.point - want).norm() < 1e-9);
    }
}

TEST_CASE("closest-point distance is 1-Lipschitz") {
    const Mesh bell = shapes::dumbbell();
    const AabbTree tree(bell);
    Rng rng(13);
    const Box3 domain(Vec3(-4, -3, -3), Vec3(4, 3, 3));
    for (int i = 0; i < 2000; ++i) {
        const Vec3 q1 = rng.in_box(domain);
        const Vec3 q2 = rng.in_box(domain);
        const double d1 = tree.closest(q1).distance;
        const double d2 = tree.closest(q2).distance;
        CHECK(std::abs(d1 - d2) <= (q1 - q2).norm() + 1e-12);
    }
}

TEST_CASE("sample CSV export round-trips through text") {
    const Mesh cube = shapes::unit_cube();
    const auto set = poisson_disk_sample(cube, 0.25, 3);
    const std::string path = "/tmp/ils_samples.csv";
    write_samples_csv(path, set);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,x,y,z,tri_index");
    size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == set.points.size());
}
