#pragma once

#include "maskfit/core.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/nonrigid.hpp"
#include "maskfit/scan.hpp"

namespace maskfit {

/// Contact band on the template, as an ordered list of vertex indices.
/// When closed, consecutive indices (cyclically) must share a mesh edge.
struct ContactRegion {
    std::vector<int> vertex_indices;
    bool closed = false;
};

/// Checks index range, uniqueness and (for closed regions) cyclic edge
/// connectivity on the given template.
void validate_region(const ContactRegion& region, const TriangleMesh& tpl);

/// Region carried onto the subject: one point per region ordinal, in order.
struct WarpedRegion {
    std::vector<Vec3> points;
};

/// Reads the deformed position of every region vertex out of the
/// registration result. Throws InvalidRegionIndex on a bad index.
WarpedRegion transfer_region(const ContactRegion& region, const RegistrationResult& result);

struct RegionValidation {
    std::vector<double> distances; // per point, mm to the nearest scan point
    std::vector<int> failed;       // ordinals exceeding the tolerance
    bool pass = true;
};

/// Nearest-scan-point distance for every warped point; fails any point
/// farther than `tol_mm` (default 2).
RegionValidation validate_region_on_scan(const WarpedRegion& warped, const RangeScan& scan,
                                         double tol_mm = 2.0);

} // namespace maskfit
