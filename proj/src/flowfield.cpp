#include "ilscape/flowfield.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ilscape/error.hpp"

namespace ilscape {

const std::array<std::string, kAttributeCount> kAttributeNames = {
    "Mt", "Md", "Ms", "Mw", "M", "O"};

NormMode parse_norm_mode(const std::string& name) {
    if (name == "average") return NormMode::Average;
    if (name == "direction") return NormMode::Direction;
    fail_input("unknown normalization mode '" + name + "'");
}

std::string norm_mode_name(NormMode mode) {
    return mode == NormMode::Average ? "average" : "direction";
}

VectorField bin_samples(const Sensor& sensor,
                        const std::vector<TrajectorySample>& samples,
                        int resolution, NormMode norm_mode) {
    if (resolution != 4 && resolution != 8 && resolution != 16) {
        fail_input("field resolution must be 4, 8 or 16");
    }

    VectorField field;
    field.sensor_id = sensor.id;
    field.resolution = resolution;
    field.norm_mode = norm_mode;
    const Vec3 half = Vec3::Constant(sensor.size / 2.0);
    field.box = Box3(sensor.center - half, sensor.center + half);

    const int n = resolution;
    field.u.assign(static_cast<size_t>(n) * n * n, Vec3::Zero());
    field.count.assign(field.u.size(), 0);

    const double h = field.cell_size();
    for (size_t s = 0; s < samples.size(); ++s) {
        const Vec3& p = samples[s].position;
        if (!field.box.contains(p)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "trajectory sample %zu lies outside sensor %d",
                          s, sensor.id);
            fail_internal(buf);
        }
        int idx[3];
        for (int k = 0; k < 3; ++k) {
            idx[k] = std::min(
                static_cast<int>((p[k] - field.box.min()[k]) / h), n - 1);
            idx[k] = std::max(idx[k], 0);
        }
        const int cell = field.index(idx[0], idx[1], idx[2]);
        field.u[cell] += samples[s].velocity;
        ++field.count[cell];
    }

    for (size_t c = 0; c < field.u.size(); ++c) {
        if (field.count[c] == 0) continue;
        if (norm_mode == NormMode::Average) {
            field.u[c] /= static_cast<double>(field.count[c]);
        } else {
            // Direction mode normalizes the sum; an (almost) cancelled
            // sum carries no net flow and stays zero.
            const double len = field.u[c].norm();
            field.u[c] = len > 1e-12 ? Vec3(field.u[c] / len) : Vec3::Zero();
        }
    }
    return field;
}

Vec3 interpolate(const VectorField& field, const Vec3& q) {
    if (!field.box.contains(q)) {
        fail_input("interpolation point lies outside the sensor box");
    }
    const int n = field.resolution;
    const double h = field.cell_size();

    int i0[3], i1[3];
    double f[3];
    for (int k = 0; k < 3; ++k) {
        const double g = (q[k] - field.box.min()[k]) / h - 0.5;
        const double base = std::floor(g);
        i0[k] = std::clamp(static_cast<int>(base), 0, n - 1);
        i1[k] = std::min(i0[k] + 1, n - 1);
        f[k] = std::clamp(g - i0[k], 0.0, 1.0);
    }

    Vec3 out = Vec3::Zero();
    for (int dz = 0; dz < 2; ++dz) {
        for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
                const double w = (dx ? f[0] : 1 - f[0]) *
                                 (dy ? f[1] : 1 - f[1]) *
                                 (dz ? f[2] : 1 - f[2]);
                out += w * field.u[field.index(dx ? i1[0] : i0[0],
                                               dy ? i1[1] : i0[1],
                                               dz ? i1[2] : i0[2])];
            }
        }
    }
    return out;
}

Mat3 gradient_tensor(const VectorField& field, int i, int j, int k) {
    const int n = field.resolution;
    const double h = field.cell_size();
    const int at[3] = {i, j, k};

    Mat3 T = Mat3::Zero();
    for (int axis = 0; axis < 3; ++axis) {
        int lo[3] = {i, j, k};
        int hi[3] = {i, j, k};
        lo[axis] = std::max(at[axis] - 1, 0);
        hi[axis] = std::min(at[axis] + 1, n - 1);
        const double span = (hi[axis] - lo[axis]) * h;
        if (span <= 0) continue; // resolution 1 cannot happen (>= 4)
        const Vec3 diff = (field.u[field.index(hi[0], hi[1], hi[2])] -
                           field.u[field.index(lo[0], lo[1], lo[2])]) / span;
        T.col(axis) = diff;
    }
    return T;
}

TensorParts split_tensor(const Mat3& T) {
    TensorParts p;
    p.eps = T.diagonal();
    p.theta = Vec3(T(2, 1) + T(1, 2), T(0, 2) + T(2, 0), T(1, 0) + T(0, 1));
    p.omega = 0.5 * Vec3(T(2, 1) - T(1, 2), T(0, 2) - T(2, 0),
                         T(1, 0) - T(0, 1));
    return p;
}

Mat3 strain_matrix(const TensorParts& p) {
    Mat3 S;
    S << p.eps[0], p.theta[2] / 2, p.theta[1] / 2,
         p.theta[2] / 2, p.eps[1], p.theta[0] / 2,
         p.theta[1] / 2, p.theta[0] / 2, p.eps[2];
    return S;
}

Mat3 spin_matrix(const TensorParts& p) {
    Mat3 A;
    A << 0, -p.omega[2], p.omega[1],
         p.omega[2], 0, -p.omega[0],
         -p.omega[1], p.omega[0], 0;
    return A;
}

SurfaceCache build_surface_cache(const AabbTree& surface,
                                 const VectorField& field) {
    SurfaceCache cache;
    const size_t cells = field.u.size();
    cache.have.assign(cells, 0);
    cache.point.assign(cells, Vec3::Zero());
    cache.normal.assign(cells, Vec3::UnitZ());

    const int n = field.resolution;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int c = field.index(i, j, k);
                if (field.count[c] == 0) continue;
                const SurfaceHit hit = surface.closest(field.cell_center(i, j, k));
                cache.have[c] = 1;
                cache.point[c] = hit.point;
                cache.normal[c] = hit.normal;
            }
        }
    }
    return cache;
}

AttributeGrids compute_attributes(const VectorField& field,
                                  const SurfaceCache& cache) {
    AttributeGrids grids;
    grids.resolution = field.resolution;
    for (auto& v : grids.values) v.assign(field.u.size(), 0.0);

    const int n = field.resolution;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int c = field.index(i, j, k);
                const Mat3 T = gradient_tensor(field, i, j, k);
                const TensorParts p = split_tensor(T);

                grids.values[AttrTensor][c] =
                    std::sqrt(0.5 * T.squaredNorm());
                grids.values[AttrDilation][c] = p.eps.norm();
                grids.values[AttrShear][c] = p.theta.norm();
                grids.values[AttrVorticity][c] = p.omega.norm();

                const double mag = field.u[c].norm();
                grids.values[AttrMagnitude][c] = mag;
                if (mag > 0) {
                    if (!cache.have[c]) {
                        fail_internal("surface cache missing an occupied cell");
                    }
                    const double d =
                        (field.u[c] / mag).dot(cache.normal[c]);
                    grids.values[AttrOrient][c] = (d + 1.0) / 2.0;
                } else {
                    grids.values[AttrOrient][c] = 0.5;
                }
            }
        }
    }
    return grids;
}

AttributeGrids compute_attributes(const VectorField& field,
                                  const AabbTree& surface) {
    return compute_attributes(field, build_surface_cache(surface, field));
}

void write_field_csv(const std::string& path, const VectorField& field) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "cell_i,cell_j,cell_k,ux,uy,uz,count\n";
    char buf[192];
    const int n = field.resolution;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int c = field.index(i, j, k);
                std::snprintf(buf, sizeof(buf),
                              "%d,%d,%d,%.9g,%.9g,%.9g,%d\n", i, j, k,
                              field.u[c].x(), field.u[c].y(), field.u[c].z(),
                              field.count[c]);
                out << buf;
            }
        }
    }
}

void write_attribute_csv(const std::string& path, const VectorField& field,
                         const AttributeGrids& grids, int attribute) {
    if (attribute < 0 || attribute >= kAttributeCount) {
        fail_input("attribute index out of range");
    }
    std::ofstream out(path);
    if (!out) fail_input("cannot write: " + path);
    out << "cell_i,cell_j,cell_k," << kAttributeNames[attribute] << "\n";
    char buf[96];
    const int n = field.resolution;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                std::snprintf(
                    buf, sizeof(buf), "%d,%d,%d,%.9g\n", i, j, k,
                    grids.values[attribute][field.index(i, j, k)]);
                out << buf;
            }
        }
    }
}

} // namespace ilscape
