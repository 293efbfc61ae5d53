#pragma once

#include <array>
#include <string>
#include <vector>

#include "ilscape/geom.hpp"

namespace ilscape {

// Triangle soup with derived per-vertex data. No manifoldness is assumed
// anywhere in the pipeline.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> vertex_normals; // unit length, area-weighted
    Box3 bounds;
};

// Validates indices and coordinates, computes normals and bounds.
Mesh make_mesh(std::vector<Vec3> vertices,
               std::vector<std::array<int, 3>> triangles);

// Wavefront OBJ, v/f records only. Polygons are fan-triangulated. Normals
// in the file are ignored and recomputed; 6-number v records (vertex color
// extension) are tolerated and the color is dropped.
Mesh load_mesh(const std::string& path);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const Mesh& mesh);

// One level of 4:1 midpoint refinement. Every refined vertex keeps a
// (triangle, barycentric) anchor into the source mesh so sampled points
// can be replayed on the original connectivity.
struct RefinedMesh {
    Mesh mesh;
    std::vector<int> anchor_triangle;
    std::vector<Vec3> anchor_bary;
};
RefinedMesh subdivide_midpoint(const Mesh& mesh);

// Anchors for the unrefined case: each vertex is mapped to its first
// incident triangle, or -1 if isolated.
void vertex_anchors(const Mesh& mesh, std::vector<int>& anchor_triangle,
                    std::vector<Vec3>& anchor_bary);

} // namespace ilscape
