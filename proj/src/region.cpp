#include "maskfit/region.hpp"
#include "maskfit/errors.hpp"
#include "maskfit/kdtree.hpp"

#include <set>
#include <string>

namespace maskfit {

void validate_region(const ContactRegion& region, const TriangleMesh& tpl) {
    const int n = static_cast<int>(tpl.vertices.size());
    std::set<int> seen;
    for (int idx : region.vertex_indices) {
        if (idx < 0 || idx >= n)
            throw InvalidRegionIndex("region index " + std::to_string(idx) +
                                     " outside [0," + std::to_string(n) + ")");
        if (!seen.insert(idx).second)
            throw InvalidRegionIndex("region repeats vertex " + std::to_string(idx));
    }
    if (region.closed && region.vertex_indices.size() >= 2) {
        std::set<std::pair<int, int>> edges;
        for (const Face& f : tpl.faces)
            for (int k = 0; k < 3; ++k)
                edges.insert(std::minmax(f[k], f[(k + 1) % 3]));
        const size_t m = region.vertex_indices.size();
        for (size_t k = 0; k < m; ++k) {
            const int a = region.vertex_indices[k];
            const int b = region.vertex_indices[(k + 1) % m];
            if (!edges.count(std::minmax(a, b)))
                throw InvalidRegionIndex("closed region vertices " + std::to_string(a) +
                                         " and " + std::to_string(b) +
                                         " do not share a mesh edge");
        }
    }
}

WarpedRegion transfer_region(const ContactRegion& region, const RegistrationResult& result) {
    const int n = static_cast<int>(result.deformed.vertices.size());
    WarpedRegion warped;
    warped.points.reserve(region.vertex_indices.size());
    for (int idx : region.vertex_indices) {
        if (idx < 0 || idx >= n)
            throw InvalidRegionIndex("region index " + std::to_string(idx) +
                                     " outside [0," + std::to_string(n) + ")");
        warped.points.push_back(result.deformed.vertices[idx]);
    }
    return warped;
}

RegionValidation validate_region_on_scan(const WarpedRegion& warped, const RangeScan& scan,
                                         double tol_mm) {
    if (warped.points.empty())
        throw InvalidArgument("warped region is empty");
    KdTree tree{std::span<const Vec3>(scan.points)};
    RegionValidation v;
    v.distances.reserve(warped.points.size());
    for (size_t k = 0; k < warped.points.size(); ++k) {
        const double dist = tree.nearest(warped.points[k]).distance;
        v.distances.push_back(dist);
        if (dist > tol_mm) {
            v.failed.push_back(static_cast<int>(k));
            v.pass = false;
        }
    }
    return v;
}

} // namespace maskfit
