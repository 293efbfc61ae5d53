#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "ilscape/geom.hpp"

namespace ilscape {

// Nearest-neighbor search over a fixed point set. Immutable after
// construction, safe for concurrent queries.
class PointKdTree {
public:
    PointKdTree() = default;

    explicit PointKdTree(std::vector<Vec3> points)
        : points_(std::move(points)) {
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0);
        if (!order_.empty()) build(0, static_cast<int>(order_.size()), 0);
    }

    size_t size() const { return points_.size(); }
    const Vec3& point(int i) const { return points_[i]; }

    // Index of the nearest point to q, skipping any point within
    // exclude_radius of exclude_center. Returns -1 if everything is
    // excluded. Ties resolve to the smaller index.
    int nearest_excluding(const Vec3& q, const Vec3& exclude_center,
                          double exclude_radius, double* out_dist = nullptr) const {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        if (!order_.empty()) {
            search(0, static_cast<int>(order_.size()), 0, q, exclude_center,
                   exclude_radius * exclude_radius, best, best_d2);
        }
        if (out_dist) *out_dist = best < 0 ? best_d2 : std::sqrt(best_d2);
        return best;
    }

    int nearest(const Vec3& q, double* out_dist = nullptr) const {
        return nearest_excluding(q, q, -1.0, out_dist);
    }

private:
    // Median-split kd-tree stored implicitly in order_: node = median of
    // its range, children = sub-ranges. No separate node array needed.
    void build(int begin, int end, int depth) {
        if (end - begin <= 1) return;
        const int axis = depth % 3;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid,
                         order_.begin() + end, [&](int a, int b) {
                             if (points_[a][axis] != points_[b][axis]) {
                                 return points_[a][axis] < points_[b][axis];
                             }
                             return a < b;
                         });
        build(begin, mid, depth + 1);
        build(mid + 1, end, depth + 1);
    }

    void search(int begin, int end, int depth, const Vec3& q,
                const Vec3& ex_center, double ex_r2, int& best,
                double& best_d2) const {
        if (begin >= end) return;
        const int mid = begin + (end - begin) / 2;
        const int idx = order_[mid];
        const Vec3& p = points_[idx];

        const double d2 = (p - q).squaredNorm();
        const bool excluded =
            ex_r2 >= 0.0 && (p - ex_center).squaredNorm() <= ex_r2;
        if (!excluded &&
            (d2 < best_d2 || (d2 == best_d2 && idx < best))) {
            best = idx;
            best_d2 = d2;
        }

        const int axis = depth % 3;
        const double delta = q[axis] - p[axis];
        const int near_b = delta < 0 ? begin : mid + 1;
        const int near_e = delta < 0 ? mid : end;
        const int far_b = delta < 0 ? mid + 1 : begin;
        const int far_e = delta < 0 ? end : mid;
        search(near_b, near_e, depth + 1, q, ex_center, ex_r2, best, best_d2);
        if (delta * delta < best_d2) {
            search(far_b, far_e, depth + 1, q, ex_center, ex_r2, best, best_d2);
        }
    }

    std::vector<Vec3> points_;
    std::vector<int> order_;
};

} // namespace ilscape
