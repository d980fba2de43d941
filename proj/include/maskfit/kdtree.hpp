#pragma once

#include "maskfit/core.hpp"

namespace maskfit {

/// Axis-aligned binary partition of a point set. Cells split along their
/// longest extent at the median until each leaf holds a single point.
/// Queries return the exact nearest neighbor: descent plus backtracking
/// whenever the splitting plane is closer than the current best. Ties in
/// distance resolve to the lower point index.
///
/// Immutable after construction; nearest() is safe to call concurrently.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points);

    struct Hit {
        int index;
        double distance;
    };
    Hit nearest(const Vec3& query) const;

    size_t size() const { return points_.size(); }
    int leaf_count() const { return leaf_count_; }
    int depth() const { return depth_; } // edges on the longest root-to-leaf path

private:
    struct Node {
        int axis = -1;      // -1 marks a leaf
        double plane = 0.0; // splitting coordinate
        int left = -1, right = -1;
        int point = -1; // leaf payload
    };

    int build(std::span<int> ids, int level);
    void search(int node, const Vec3& q, int& best, double& best_d2) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    int root_ = -1;
    int leaf_count_ = 0;
    int depth_ = 0;
};

} // namespace maskfit
