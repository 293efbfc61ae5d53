#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace ilscape {

using Vec3 = Eigen::Vector3d;
using Box3 = Eigen::AlignedBox3d;
using Mat3 = Eigen::Matrix3d;

// Strict lexicographic order on coordinates. Used as a deterministic
// tie-break wherever "farthest" or "nearest" can be ambiguous.
inline bool lex_less(const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
}

inline double sqr(double x) { return x * x; }

} // namespace ilscape
