#pragma once

#include "maskfit/core.hpp"
#include "maskfit/mesh.hpp"

#include <optional>

namespace maskfit {

struct PinholeIntrinsics {
    double fx, fy, cx, cy; // pixels
};

/// A single range scan: a 3D point cloud, optionally backed by the image
/// lattice it was acquired on. grid[v*width+u] holds the point index at
/// pixel (u,v) or -1 where no depth was measured.
struct RangeScan {
    std::vector<Vec3> points;
    std::vector<Vec3> normals; // optional, per point, unit length
    int width = 0, height = 0;
    std::vector<int32_t> grid;
    std::optional<PinholeIntrinsics> intrinsics;

    bool has_grid() const { return !grid.empty(); }
    bool has_normals() const { return normals.size() == points.size() && !points.empty(); }
    int32_t at(int u, int v) const { return grid[static_cast<size_t>(v) * width + u]; }
};

/// Throws InvalidArgument if grid entries point outside the cloud or a grid
/// is present without intrinsics.
void validate_scan(const RangeScan& scan);

enum class GridLookupStatus { Found, NoValidPixel, BehindCamera };

struct GridLookup {
    GridLookupStatus status = GridLookupStatus::NoValidPixel;
    int index = -1;
    double distance = 0.0;
};

/// Constant-time nearest lookup through the scan lattice: project the query
/// through the pinhole model, round to the nearest pixel and return the point
/// stored there. An invalid pixel falls back to the nearest valid candidate
/// in the 3x3 neighborhood.
GridLookup grid_project_nearest(const RangeScan& scan, const Vec3& query);

/// Triangulates adjacent valid pixels of a gridded scan into a mesh, dropping
/// degenerate faces. Used to estimate scan normals.
TriangleMesh mesh_from_grid(const RangeScan& scan);

/// Per-point scan normals via the grid triangulation. Points that end up
/// without any incident face keep a zero normal.
std::vector<Vec3> estimate_scan_normals(const RangeScan& scan);

} // namespace maskfit
