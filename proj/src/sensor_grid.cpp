#include "ilscape/sensor_grid.hpp"

#include <cstdio>
#include <fstream>

#include "ilscape/error.hpp"

namespace ilscape {

InteractionSpace build_space(const Mesh& mesh, double domain_size,
                             int up_axis) {
    if (up_axis < 0 || up_axis > 2) fail_input("up axis must be 0, 1 or 2");

    const Vec3 extent = mesh.bounds.diagonal();
    const double max_extent = extent.maxCoeff();

    InteractionSpace space;
    space.up_axis = up_axis;
    double edge = domain_size;
    if (edge <= 0.0) {
        edge = space.padding_factor * max_extent;
    } else if (edge < max_extent) {
        fail_input("domain size " + std::to_string(domain_size) +
                   " cannot contain the mesh (largest extent " +
                   std::to_string(max_extent) + ")");
    }

    const Vec3 center = mesh.bounds.center();
    const Vec3 half = Vec3::Constant(edge / 2.0);
    space.box = Box3(center - half, center + half);
    return space;
}

namespace {

// Octant of q relative to the cell center; max faces round up, which is
// what makes cell ownership half-open.
int octant_of(const Vec3& q, const Vec3& center) {
    return (q.x() >= center.x() ? 1 : 0) | (q.y() >= center.y() ? 2 : 0) |
           (q.z() >= center.z() ? 4 : 0);
}

} // namespace

SensorTree build_sensor_tree(const InteractionSpace& space,
                             const SurfaceSampleSet& samples, int max_depth) {
    if (max_depth < 1 || max_depth > 12) {
        fail_input("octree depth must be in [1,12]");
    }
    for (size_t i = 0; i < samples.points.size(); ++i) {
        if (!space.box.contains(samples.points[i])) {
            const Vec3& p = samples.points[i];
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "surface sample %zu (%.6g, %.6g, %.6g) "
                          "lies outside the interaction space",
                          i, p.x(), p.y(), p.z());
            fail_input(buf);
        }
    }

    SensorTree tree;
    tree.box_ = space.box;
    tree.max_depth_ = max_depth;
    const double root_edge = space.box.diagonal().x();

    struct Job {
        int node;
        int depth;
        std::vector<int> inside; // sample indices in this cell
    };

    tree.nodes_.push_back({space.box.center(), -1, -1});
    std::vector<int> all(samples.points.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    // Depth-first with the 8 children expanded in octant order keeps
    // sensor ids independent of anything but the geometry.
    std::vector<Job> stack;
    stack.push_back({0, 0, std::move(all)});
    while (!stack.empty()) {
        Job job = std::move(stack.back());
        stack.pop_back();
        // nodes_ may reallocate below; never hold a reference across that.
        const Vec3 c = tree.nodes_[job.node].center;

        if (job.inside.size() <= 1 || job.depth >= max_depth) {
            Sensor s;
            s.id = static_cast<int>(tree.sensors_.size());
            s.center = c;
            s.depth = job.depth;
            s.size = root_edge / static_cast<double>(1 << job.depth);
            tree.nodes_[job.node].sensor = s.id;
            tree.sensors_.push_back(s);
            continue;
        }

        const int child_base = static_cast<int>(tree.nodes_.size());
        tree.nodes_[job.node].children = child_base;
        const double quarter =
            root_edge / static_cast<double>(1 << (job.depth + 2));
        for (int o = 0; o < 8; ++o) {
            const Vec3 offset((o & 1) ? quarter : -quarter,
                              (o & 2) ? quarter : -quarter,
                              (o & 4) ? quarter : -quarter);
            tree.nodes_.push_back({c + offset, -1, -1});
        }

        std::array<std::vector<int>, 8> split;
        for (const int i : job.inside) {
            split[octant_of(samples.points[i], c)].push_back(i);
        }
        // Push in reverse so octant 0 is processed first.
        for (int o = 7; o >= 0; --o) {
            stack.push_back({child_base + o, job.depth + 1,
                             std::move(split[o])});
        }
    }
    return tree;
}

int SensorTree::locate(const Vec3& q) const {
    if (nodes_.empty() || !box_.contains(q)) return -1;
    int node = 0;
    while (nodes_[node].children >= 0) {
        node = nodes_[node].children + octant_of(q, nodes_[node].center);
    }
    return nodes_[node].sensor;
}

void write_sensors_csv(const std::string& path, const SensorTree& tree) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "id,depth,cx,cy,cz,size\n";
    char buf[160];
    for (const Sensor& s : tree.sensors()) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g,%.9g\n", s.id,
                      s.depth, s.center.x(), s.center.y(), s.center.z(),
                      s.size);
        out << buf;
    }
}

} // namespace ilscape
