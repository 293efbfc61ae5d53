#include "ilscape/aabb_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ilscape/error.hpp"

namespace ilscape {

namespace {

Vec3 closest_point_segment(const Vec3& q, const Vec3& a, const Vec3& b,
                           double& t) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) {
        t = 0.0;
        return a;
    }
    t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

double dist2_point_box(const Vec3& q, const Box3& box) {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double lo = box.min()[k] - q[k];
        const double hi = q[k] - box.max()[k];
        if (lo > 0) d2 += lo * lo;
        if (hi > 0) d2 += hi * hi;
    }
    return d2;
}

} // namespace

Vec3 closest_point_triangle(const Vec3& q, const Vec3& a, const Vec3& b,
                            const Vec3& c, double& u, double& v, double& w) {
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;

    if (ab.cross(ac).squaredNorm() <= 1e-60) {
        // Zero-area triangle: best point over the three edges.
        double best_d2 = std::numeric_limits<double>::infinity();
        Vec3 best = a;
        u = 1.0; v = 0.0; w = 0.0;
        const Vec3 corners[3] = {a, b, c};
        for (int e = 0; e < 3; ++e) {
            double t;
            const Vec3 p =
                closest_point_segment(q, corners[e], corners[(e + 1) % 3], t);
            const double d2 = (q - p).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = p;
                double bw[3] = {0, 0, 0};
                bw[e] = 1.0 - t;
                bw[(e + 1) % 3] = t;
                u = bw[0]; v = bw[1]; w = bw[2];
            }
        }
        return best;
    }

    // Voronoi-region walk over vertices, edges, interior.
    const Vec3 ap = q - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        u = 1; v = 0; w = 0;
        return a;
    }

    const Vec3 bp = q - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        u = 0; v = 1; w = 0;
        return b;
    }

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        u = 1 - t; v = t; w = 0;
        return a + t * ab;
    }

    const Vec3 cp = q - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        u = 0; v = 0; w = 1;
        return c;
    }

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        u = 1 - t; v = 0; w = t;
        return a + t * ac;
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        u = 0; v = 1 - t; w = t;
        return b + t * (c - b);
    }

    const double denom = 1.0 / (va + vb + vc);
    v = vb * denom;
    w = vc * denom;
    u = 1.0 - v - w;
    return a + ab * v + ac * w;
}

AabbTree::AabbTree(const Mesh& mesh) {
    if (mesh.triangles.empty()) fail_internal("AabbTree over empty mesh");
    verts_ = mesh.vertices;
    vnormals_ = mesh.vertex_normals;
    tris_ = mesh.triangles;

    order_.resize(tris_.size());
    std::iota(order_.begin(), order_.end(), 0);

    std::vector<Vec3> centroids(tris_.size());
    for (size_t t = 0; t < tris_.size(); ++t) {
        centroids[t] = (verts_[tris_[t][0]] + verts_[tris_[t][1]] +
                        verts_[tris_[t][2]]) / 3.0;
    }
    nodes_.reserve(tris_.size() * 2);
    build(0, static_cast<int>(tris_.size()), centroids);
}

int AabbTree::build(int begin, int end, std::vector<Vec3>& centroids) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    Box3 box;
    box.setEmpty();
    Box3 cbox;
    cbox.setEmpty();
    for (int i = begin; i < end; ++i) {
        const auto& tr = tris_[order_[i]];
        box.extend(verts_[tr[0]]);
        box.extend(verts_[tr[1]]);
        box.extend(verts_[tr[2]]);
        cbox.extend(centroids[order_[i]]);
    }
    nodes_[node_index].box = box;

    const int count = end - begin;
    if (count <= 4) {
        nodes_[node_index].begin = begin;
        nodes_[node_index].end = end;
        return node_index;
    }

    int axis = 0;
    const Vec3 ext = cbox.diagonal();
    if (ext.y() > ext.x()) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;

    const int mid = begin + count / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int lhs, int rhs) {
                         if (centroids[lhs][axis] != centroids[rhs][axis]) {
                             return centroids[lhs][axis] < centroids[rhs][axis];
                         }
                         return lhs < rhs;
                     });

    const int left = build(begin, mid, centroids);
    const int right = build(mid, end, centroids);
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
}

SurfaceHit AabbTree::closest(const Vec3& q) const {
    if (nodes_.empty()) fail_internal("closest() on empty AabbTree");

    SurfaceHit hit;
    double best_d2 = std::numeric_limits<double>::infinity();
    double bu = 1, bv = 0, bw = 0;

    // Explicit stack, children visited nearer-first so pruning bites early.
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (dist2_point_box(q, node.box) >= best_d2) continue;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int t = order_[i];
                const auto& tr = tris_[t];
                double u, v, w;
                const Vec3 p = closest_point_triangle(
                    q, verts_[tr[0]], verts_[tr[1]], verts_[tr[2]], u, v, w);
                const double d2 = (q - p).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    hit.point = p;
                    hit.triangle = t;
                    bu = u; bv = v; bw = w;
                }
            }
            continue;
        }
        const double dl = dist2_point_box(q, nodes_[node.left].box);
        const double dr = dist2_point_box(q, nodes_[node.right].box);
        if (dl < dr) {
            if (dr < best_d2) stack[top++] = node.right;
            if (dl < best_d2) stack[top++] = node.left;
        } else {
            if (dl < best_d2) stack[top++] = node.left;
            if (dr < best_d2) stack[top++] = node.right;
        }
    }

    hit.distance = std::sqrt(best_d2);
    const auto& tr = tris_[hit.triangle];
    Vec3 n = bu * vnormals_[tr[0]] + bv * vnormals_[tr[1]] +
             bw * vnormals_[tr[2]];
    const double len = n.norm();
    if (len > 1e-12) {
        hit.normal = n / len;
    } else {
        const Vec3 fn = (verts_[tr[1]] - verts_[tr[0]])
                            .cross(verts_[tr[2]] - verts_[tr[0]]);
        const double flen = fn.norm();
        hit.normal = flen > 1e-30 ? Vec3(fn / flen) : Vec3::UnitZ();
    }
    return hit;
}

} // namespace ilscape
