#pragma once

#include "maskfit/core.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/region.hpp"

namespace maskfit {

/// Tensor-product NURBS patch with clamped knot vectors and positive
/// weights. Control points are stored row-major: index (i,j) -> i*nv + j
/// with i running along u and j along v.
struct NurbsSurface {
    int degree_u = 3, degree_v = 3;
    std::vector<double> knots_u, knots_v;
    int nu = 0, nv = 0;
    std::vector<Vec3> control;
    std::vector<double> weights;

    int ctrl_index(int i, int j) const { return i * nv + j; }
    std::pair<double, double> domain_u() const;
    std::pair<double, double> domain_v() const;
};

/// Enforces the structural invariants: knot counts n+degree+1, non-decreasing
/// clamped knot vectors, weights > 0, grid sizes consistent.
void validate_surface(const NurbsSurface& s);

/// Rational evaluation at (u, v). The domain end is half-open-interval
/// corrected so the last point is reachable. Throws OutOfDomain.
Vec3 evaluate_surface(const NurbsSurface& s, double u, double v);

/// Manually authored correspondence from control points to region ordinals.
struct ControlMap {
    struct Entry {
        int i, j; // control grid index
        int k;    // region ordinal
    };
    std::vector<Entry> entries;
};

/// Control indices must be valid and unique; ordinals must be < region_size.
void validate_control_map(const ControlMap& map, const NurbsSurface& s, size_t region_size);

/// Translates every mapped control point onto its warped region point.
/// Knots, weights, degrees and unmapped control points are untouched.
NurbsSurface fit_interface(const NurbsSurface& generic, const ControlMap& map,
                           const WarpedRegion& warped);

/// Samples the patch on a regular res_u x res_v parameter lattice and
/// triangulates it into 2(res_u-1)(res_v-1) faces.
TriangleMesh tessellate(const NurbsSurface& s, int res_u, int res_v);

namespace serial {
TriangleMesh tessellate(const NurbsSurface& s, int res_u, int res_v);
} // namespace serial

} // namespace maskfit
