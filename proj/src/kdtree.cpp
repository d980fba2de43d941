#include "maskfit/kdtree.hpp"
#include "maskfit/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace maskfit {

KdTree::KdTree(std::span<const Vec3> points)
    : points_(points.begin(), points.end()) {
    if (points_.empty())
        throw EmptyPointSet("cannot build a KD-tree from zero points");
    nodes_.reserve(2 * points_.size());
    std::vector<int> ids(points_.size());
    std::iota(ids.begin(), ids.end(), 0);
    root_ = build(std::span<int>(ids), 0);
}

int KdTree::build(std::span<int> ids, int level) {
    depth_ = std::max(depth_, level);
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (ids.size() == 1) {
        nodes_[node_id].point = ids[0];
        ++leaf_count_;
        return node_id;
    }

    Vec3 lo = points_[ids[0]], hi = points_[ids[0]];
    for (int id : ids) {
        lo = lo.cwiseMin(points_[id]);
        hi = hi.cwiseMax(points_[id]);
    }
    const Vec3 extent = hi - lo;
    int axis = 0;
    if (extent[1] > extent[axis]) axis = 1;
    if (extent[2] > extent[axis]) axis = 2;

    // median split; (coordinate, index) ordering makes the tree deterministic
    // and keeps the two halves within one point of each other
    const size_t mid = ids.size() / 2;
    std::nth_element(ids.begin(), ids.begin() + mid, ids.end(), [&](int a, int b) {
        const double ca = points_[a][axis], cb = points_[b][axis];
        return ca < cb || (ca == cb && a < b);
    });
    const double plane = points_[ids[mid]][axis];

    const int left = build(ids.first(mid), level + 1);
    const int right = build(ids.subspan(mid), level + 1);
    Node& n = nodes_[node_id];
    n.axis = axis;
    n.plane = plane;
    n.left = left;
    n.right = right;
    return node_id;
}

void KdTree::search(int node_id, const Vec3& q, int& best, double& best_d2) const {
    const Node& n = nodes_[node_id];
    if (n.axis < 0) {
        const double d2 = (points_[n.point] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && n.point < best)) {
            best_d2 = d2;
            best = n.point;
        }
        return;
    }
    const double delta = q[n.axis] - n.plane;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search(near, q, best, best_d2);
    // the far cell can still hold an equally close, lower-index point, so
    // backtrack on <= rather than <
    if (delta * delta <= best_d2)
        search(far, q, best, best_d2);
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    search(root_, query, best, best_d2);
    return {best, std::sqrt(best_d2)};
}

} // namespace maskfit
