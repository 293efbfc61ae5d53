#pragma once

#include <string>
#include <vector>

#include "ilscape/mesh.hpp"
#include "ilscape/sampling.hpp"

namespace ilscape {

// The cubic region U that interactions are observed in. Everything
// outside it is ignored by the encoder.
struct InteractionSpace {
    Box3 box;                     // always a cube
    double padding_factor = 1.5;  // used when the edge is chosen automatically
    int up_axis = 2;              // 0=X 1=Y 2=Z, canonical orientation
};

// Cube centered on the mesh bounds. domain_size <= 0 picks the edge
// automatically as padding * the largest mesh extent.
InteractionSpace build_space(const Mesh& mesh, double domain_size = 0.0,
                             int up_axis = 2);

// A leaf cell of the sensor tree. size = U_edge / 2^depth.
struct Sensor {
    int id = -1;
    Vec3 center = Vec3::Zero();
    double size = 0.0;
    int depth = 0;
};

// Octree over U: every cell holding more than one surface sample splits,
// up to max_depth. The leaves are the sensors; together they tile U with
// no gaps or overlap. Immutable after build, safe for concurrent reads.
class SensorTree {
public:
    SensorTree() = default;

    const Box3& space() const { return box_; }
    int max_depth() const { return max_depth_; }
    const std::vector<Sensor>& sensors() const { return sensors_; }
    const Sensor& sensor(int id) const { return sensors_[id]; }

    // Sensor id owning q, or -1 outside U. Cells own [min,max) except
    // that U's outer max faces are closed, so every point of U has
    // exactly one owner.
    int locate(const Vec3& q) const;

    friend SensorTree build_sensor_tree(const InteractionSpace& space,
                                        const SurfaceSampleSet& samples,
                                        int max_depth);

private:
    struct Node {
        Vec3 center = Vec3::Zero();
        int children = -1; // block of 8 consecutive nodes; -1 for leaves
        int sensor = -1;   // leaf payload
    };

    std::vector<Node> nodes_;
    std::vector<Sensor> sensors_;
    Box3 box_;
    int max_depth_ = 0;
};

SensorTree build_sensor_tree(const InteractionSpace& space,
                             const SurfaceSampleSet& samples, int max_depth);

// Debug export: id,depth,cx,cy,cz,size
void write_sensors_csv(const std::string& path, const SensorTree& tree);

} // namespace ilscape
