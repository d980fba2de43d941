#include "maskfit/correspondence.hpp"
#include "maskfit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace maskfit {

void validate_prune_config(const PruneConfig& cfg) {
    if (!(cfg.max_distance_mm > 0.0) || !(cfg.max_normal_angle_deg > 0.0))
        throw InvalidArgument("prune thresholds must be strictly positive");
}

namespace {

inline double normal_angle_deg(const Vec3& a, const Vec3& b) {
    const double d = std::clamp(a.dot(b), -1.0, 1.0);
    return rad_to_deg(std::acos(d));
}

// One vertex's match; scan_point = -1 when the lattice lookup fails.
inline CorrespondencePair match_one(const TriangleMesh& tpl, const RangeScan& scan,
                                    std::span<const Vec3> scan_normals,
                                    const KdTree* tree, int v) {
    CorrespondencePair pair;
    pair.template_vertex = v;
    if (scan.has_grid()) {
        const GridLookup hit = grid_project_nearest(scan, tpl.vertices[v]);
        if (hit.status != GridLookupStatus::Found)
            return pair;
        pair.scan_point = hit.index;
        pair.distance = hit.distance;
    } else {
        const KdTree::Hit hit = tree->nearest(tpl.vertices[v]);
        pair.scan_point = hit.index;
        pair.distance = hit.distance;
    }
    pair.normal_angle = normal_angle_deg(tpl.normals[v], scan_normals[pair.scan_point]);
    return pair;
}

std::vector<CorrespondencePair> compact(std::vector<CorrespondencePair>&& all) {
    std::vector<CorrespondencePair> out;
    out.reserve(all.size());
    for (CorrespondencePair& p : all)
        if (p.scan_point >= 0)
            out.push_back(p);
    return out;
}

void check_match_inputs(const TriangleMesh& tpl, const RangeScan& scan,
                        std::span<const Vec3> scan_normals, const KdTree* tree) {
    if (tpl.vertices.empty() || scan.points.empty())
        throw InvalidArgument("matching requires a nonempty template and scan");
    if (!tpl.has_normals())
        throw InvalidArgument("template normals must be computed before matching");
    if (scan_normals.size() != scan.points.size())
        throw InvalidArgument("scan normal count does not match point count");
    if (!scan.has_grid() && tree == nullptr)
        throw InvalidArgument("a KD-tree is required when the scan has no grid");
}

} // namespace

std::vector<CorrespondencePair> match_closest(const TriangleMesh& tpl,
                                              const RangeScan& scan,
                                              std::span<const Vec3> scan_normals,
                                              const KdTree* tree) {
    check_match_inputs(tpl, scan, scan_normals, tree);
    std::vector<CorrespondencePair> all(tpl.vertices.size());
#pragma omp parallel for schedule(static)
    for (int v = 0; v < static_cast<int>(tpl.vertices.size()); ++v)
        all[v] = match_one(tpl, scan, scan_normals, tree, v);
    return compact(std::move(all));
}

namespace serial {
std::vector<CorrespondencePair> match_closest(const TriangleMesh& tpl,
                                              const RangeScan& scan,
                                              std::span<const Vec3> scan_normals,
                                              const KdTree* tree) {
    check_match_inputs(tpl, scan, scan_normals, tree);
    std::vector<CorrespondencePair> all(tpl.vertices.size());
    for (int v = 0; v < static_cast<int>(tpl.vertices.size()); ++v)
        all[v] = match_one(tpl, scan, scan_normals, tree, v);
    return compact(std::move(all));
}
} // namespace serial

std::vector<CorrespondencePair> prune_pairs(std::span<const CorrespondencePair> pairs,
                                            const PruneConfig& cfg) {
    validate_prune_config(cfg);
    std::vector<CorrespondencePair> kept;
    kept.reserve(pairs.size());
    for (const CorrespondencePair& p : pairs)
        if (p.distance <= cfg.max_distance_mm && p.normal_angle <= cfg.max_normal_angle_deg)
            kept.push_back(p);
    if (kept.empty())
        throw AllPairsPruned("no correspondence survived the distance/normal gates");
    return kept;
}

} // namespace maskfit
