#pragma once

#include <vector>

#include "ilscape/mesh.hpp"

namespace ilscape {

// Closest point on the closest triangle of a mesh.
struct SurfaceHit {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ(); // interpolated vertex normal at point
    double distance = 0.0;
    int triangle = -1;
};

// Bounding-volume tree over mesh triangles for exact closest-point
// queries. Owns copies of the geometry it needs, so the tree stays valid
// independently of the source Mesh. Immutable after construction and safe
// for concurrent queries.
class AabbTree {
public:
    AabbTree() = default;
    explicit AabbTree(const Mesh& mesh);

    bool empty() const { return nodes_.empty(); }

    SurfaceHit closest(const Vec3& q) const;

private:
    struct Node {
        Box3 box;
        int left = -1;   // internal: child indices; leaf: left < 0
        int right = -1;
        int begin = 0;   // leaf: range into order_
        int end = 0;
    };

    int build(int begin, int end, std::vector<Vec3>& centroids);

    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Vec3> verts_;
    std::vector<Vec3> vnormals_;
    std::vector<std::array<int, 3>> tris_;
};

// Closest point on a single triangle; fills unit barycentric weights of
// the result. Degenerate triangles fall back to the closest edge point.
Vec3 closest_point_triangle(const Vec3& q, const Vec3& a, const Vec3& b,
                            const Vec3& c, double& u, double& v, double& w);

} // namespace ilscape
