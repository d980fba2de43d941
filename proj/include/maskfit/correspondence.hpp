#pragma once

#include "maskfit/core.hpp"
#include "maskfit/kdtree.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/scan.hpp"

namespace maskfit {

struct CorrespondencePair {
    int template_vertex = -1;
    int scan_point = -1;
    double distance = 0.0;         // mm, between current template vertex and scan point
    double normal_angle = 0.0;     // degrees between the two unit normals
};

struct PruneConfig {
    double max_distance_mm = 5.0;
    double max_normal_angle_deg = 25.0;
};
void validate_prune_config(const PruneConfig& cfg);

/// One candidate pair per template vertex, matched against the scan through
/// the image lattice when present, otherwise through `tree` (which must then
/// be non-null and built over scan.points). Vertices whose grid projection
/// finds no valid pixel produce no pair. Output is ordered by template
/// vertex and identical to the serial implementation.
///
/// The mesh must carry cached normals; `scan_normals` must be unit length
/// (zero normals are allowed and simply fail the angle gate later).
std::vector<CorrespondencePair> match_closest(const TriangleMesh& tpl,
                                              const RangeScan& scan,
                                              std::span<const Vec3> scan_normals,
                                              const KdTree* tree);

namespace serial {
std::vector<CorrespondencePair> match_closest(const TriangleMesh& tpl,
                                              const RangeScan& scan,
                                              std::span<const Vec3> scan_normals,
                                              const KdTree* tree);
} // namespace serial

/// Keeps pairs with distance <= max_distance AND angle <= max_normal_angle;
/// both boundaries inclusive. Order-preserving. Throws AllPairsPruned when
/// nothing survives.
std::vector<CorrespondencePair> prune_pairs(std::span<const CorrespondencePair> pairs,
                                            const PruneConfig& cfg);

} // namespace maskfit
