#pragma once

#include <array>
#include <string>
#include <vector>

#include "ilscape/aabb_tree.hpp"
#include "ilscape/sensor_grid.hpp"
#include "ilscape/trajectory.hpp"

namespace ilscape {

// How per-cell vectors are normalized when samples are merged.
// Average keeps magnitudes (mean velocity); Direction keeps only the
// net direction as a unit vector.
enum class NormMode { Average, Direction };

NormMode parse_norm_mode(const std::string& name);
std::string norm_mode_name(NormMode mode);

// Discretized flow inside one sensor: an n^3 grid of merged velocity
// vectors. Cell (i,j,k) is stored at i + n*(j + n*k); empty cells hold
// the zero vector.
struct VectorField {
    int sensor_id = -1;
    int resolution = 8;
    NormMode norm_mode = NormMode::Average;
    Box3 box;
    std::vector<Vec3> u;
    std::vector<int> count;

    int index(int i, int j, int k) const {
        return i + resolution * (j + resolution * k);
    }
    double cell_size() const {
        return (box.max().x() - box.min().x()) / resolution;
    }
    Vec3 cell_center(int i, int j, int k) const {
        const double h = cell_size();
        return box.min() + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
    }
};

// Merge trajectory samples into the sensor's grid. Samples must already
// be filtered to this sensor; anything outside its box is an error.
VectorField bin_samples(const Sensor& sensor,
                        const std::vector<TrajectorySample>& samples,
                        int resolution, NormMode norm_mode);

// Trilinear blend of the 8 surrounding cell centers, clamped to the edge
// cells near the boundary. q must lie inside the field's box.
Vec3 interpolate(const VectorField& field, const Vec3& q);

// Velocity gradient at a cell: T(r,c) = dV_r / dx_c, central differences
// in the interior and one-sided at the faces.
Mat3 gradient_tensor(const VectorField& field, int i, int j, int k);

// Decomposition of T into strain and spin. eps holds the diagonal,
// theta the symmetric off-diagonal sums, omega the antisymmetric halves.
struct TensorParts {
    Vec3 eps = Vec3::Zero();
    Vec3 theta = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
};

TensorParts split_tensor(const Mat3& T);
Mat3 strain_matrix(const TensorParts& p); // S, symmetric
Mat3 spin_matrix(const TensorParts& p);   // A, antisymmetric; S + A = T

// The six per-cell attributes, always in this order.
enum Attribute : int {
    AttrTensor = 0,    // M_t: sqrt(1/2 sum T_ij^2)
    AttrDilation = 1,  // M_d: sqrt(sum eps^2)
    AttrShear = 2,     // M_s: sqrt(sum theta^2)
    AttrVorticity = 3, // M_w: sqrt(sum omega^2)
    AttrMagnitude = 4, // M:   |u|
    AttrOrient = 5,    // O:   (u_hat . n_hat + 1)/2, 0.5 when u = 0
};
constexpr int kAttributeCount = 6;
extern const std::array<std::string, kAttributeCount> kAttributeNames;

struct AttributeGrids {
    int resolution = 8;
    std::array<std::vector<double>, kAttributeCount> values;
};

// Closest surface point and normal per cell center of one sensor,
// computed once per (surface, sensor) pair because the queries dominate
// encoding time. Only cells that hold samples are filled.
struct SurfaceCache {
    std::vector<char> have;
    std::vector<Vec3> point;
    std::vector<Vec3> normal;
};

SurfaceCache build_surface_cache(const AabbTree& surface,
                                 const VectorField& field);

AttributeGrids compute_attributes(const VectorField& field,
                                  const SurfaceCache& cache);
AttributeGrids compute_attributes(const VectorField& field,
                                  const AabbTree& surface);

// Debug dumps: cell_i,cell_j,cell_k,ux,uy,uz,count and one value file
// per attribute.
void write_field_csv(const std::string& path, const VectorField& field);
void write_attribute_csv(const std::string& path, const VectorField& field,
                         const AttributeGrids& grids, int attribute);

} // namespace ilscape
