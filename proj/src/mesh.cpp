#include "ilscape/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ilscape/error.hpp"

namespace ilscape {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

double surface_area(const Mesh& mesh) {
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]],
                              mesh.vertices[t[2]]);
    }
    return area;
}

Mesh make_mesh(std::vector<Vec3> vertices,
               std::vector<std::array<int, 3>> triangles) {
    if (triangles.empty()) fail_input("mesh has zero triangles");
    const int n = static_cast<int>(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (!vertices[i].allFinite()) {
            fail_input("non-finite coordinate at vertex " + std::to_string(i));
        }
    }
    for (size_t i = 0; i < triangles.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            const int v = triangles[i][k];
            if (v < 0 || v >= n) {
                fail_input("triangle " + std::to_string(i) +
                           " references missing vertex " + std::to_string(v));
            }
        }
    }

    Mesh m;
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);

    // Area-weighted normals: the face cross product already carries the
    // 2*area factor, so summing it per corner is the weighting.
    m.vertex_normals.assign(m.vertices.size(), Vec3::Zero());
    for (const auto& t : m.triangles) {
        const Vec3 fn = (m.vertices[t[1]] - m.vertices[t[0]])
                            .cross(m.vertices[t[2]] - m.vertices[t[0]]);
        for (int k = 0; k < 3; ++k) m.vertex_normals[t[k]] += fn;
    }
    for (auto& nrm : m.vertex_normals) {
        const double len = nrm.norm();
        nrm = len > 1e-30 ? Vec3(nrm / len) : Vec3(0, 0, 1);
    }

    m.bounds.setEmpty();
    for (const auto& v : m.vertices) m.bounds.extend(v);
    return m;
}

namespace {

int parse_face_index(const std::string& token, int vertex_count,
                     const std::string& path) {
    // Face tokens may be i, i/j, i//k or i/j/k; only the vertex index
    // matters here. OBJ indices are 1-based, negative counts from the end.
    const size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token
                                                        : token.substr(0, slash);
    int idx = 0;
    try {
        idx = std::stoi(head);
    } catch (const std::exception&) {
        fail_input(path + ": malformed face index '" + token + "'");
    }
    if (idx < 0) idx = vertex_count + idx; else idx = idx - 1;
    if (idx < 0 || idx >= vertex_count) {
        fail_input(path + ": face index '" + token + "' out of range");
    }
    return idx;
}

} // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_input("cannot open mesh file: " + path);

    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;

        if (key == "v") {
            // strtod instead of stream extraction: "nan" and "inf" must
            // parse so they can be reported as non-finite, not as syntax.
            double coord[3];
            for (int k = 0; k < 3; ++k) {
                std::string token;
                char* end = nullptr;
                if (!(ls >> token) ||
                    (coord[k] = std::strtod(token.c_str(), &end),
                     end == token.c_str() || *end != '\0')) {
                    fail_input(path + ":" + std::to_string(line_no) +
                               ": vertex needs 3 coordinates");
                }
                if (!std::isfinite(coord[k])) {
                    fail_input(path + ":" + std::to_string(line_no) +
                               ": non-finite vertex coordinate");
                }
            }
            vertices.emplace_back(coord[0], coord[1], coord[2]);
        } else if (key == "f") {
            std::vector<int> face;
            std::string token;
            while (ls >> token) {
                face.push_back(parse_face_index(
                    token, static_cast<int>(vertices.size()), path));
            }
            if (face.size() < 3) {
                fail_input(path + ":" + std::to_string(line_no) +
                           ": face needs at least 3 vertices");
            }
            for (size_t k = 1; k + 1 < face.size(); ++k) {
                triangles.push_back({face[0], face[k], face[k + 1]});
            }
        }
        // vn/vt/usemtl/o/g/s/mtllib carry nothing the pipeline uses.
    }

    if (triangles.empty()) fail_input(path + ": zero triangles");
    return make_mesh(std::move(vertices), std::move(triangles));
}

void vertex_anchors(const Mesh& mesh, std::vector<int>& anchor_triangle,
                    std::vector<Vec3>& anchor_bary) {
    anchor_triangle.assign(mesh.vertices.size(), -1);
    anchor_bary.assign(mesh.vertices.size(), Vec3::Zero());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int v = mesh.triangles[t][k];
            if (anchor_triangle[v] >= 0) continue;
            anchor_triangle[v] = static_cast<int>(t);
            anchor_bary[v] = Vec3::Zero();
            anchor_bary[v][k] = 1.0;
        }
    }
}

RefinedMesh subdivide_midpoint(const Mesh& mesh) {
    RefinedMesh out;
    std::vector<Vec3> verts = mesh.vertices;
    vertex_anchors(mesh, out.anchor_triangle, out.anchor_bary);

    // Shared edges get one midpoint; the anchor uses the first triangle
    // (in index order) that touches the edge.
    std::unordered_map<uint64_t, int> edge_mid;
    auto midpoint = [&](int a, int b, int tri, int ca, int cb) {
        const uint64_t key =
            (static_cast<uint64_t>(std::min(a, b)) << 32) |
            static_cast<uint64_t>(std::max(a, b));
        auto it = edge_mid.find(key);
        if (it != edge_mid.end()) return it->second;
        const int idx = static_cast<int>(verts.size());
        verts.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        Vec3 bary = Vec3::Zero();
        bary[ca] = 0.5;
        bary[cb] = 0.5;
        out.anchor_triangle.push_back(tri);
        out.anchor_bary.push_back(bary);
        edge_mid.emplace(key, idx);
        return idx;
    };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(mesh.triangles.size() * 4);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const int ti = static_cast<int>(t);
        const int mab = midpoint(tr[0], tr[1], ti, 0, 1);
        const int mbc = midpoint(tr[1], tr[2], ti, 1, 2);
        const int mca = midpoint(tr[2], tr[0], ti, 2, 0);
        tris.push_back({tr[0], mab, mca});
        tris.push_back({mab, tr[1], mbc});
        tris.push_back({mca, mbc, tr[2]});
        tris.push_back({mab, mbc, mca});
    }

    out.mesh = make_mesh(std::move(verts), std::move(tris));
    return out;
}

} // namespace ilscape
