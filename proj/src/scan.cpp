#include "maskfit/scan.hpp"
#include "maskfit/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace maskfit {

void validate_scan(const RangeScan& scan) {
    if (scan.has_grid()) {
        if (!scan.intrinsics)
            throw InvalidArgument("scan carries a pixel grid but no intrinsics");
        if (scan.grid.size() != static_cast<size_t>(scan.width) * scan.height)
            throw InvalidArgument("grid size does not match width*height");
        for (int32_t idx : scan.grid)
            if (idx >= 0 && idx >= static_cast<int32_t>(scan.points.size()))
                throw InvalidArgument("grid entry " + std::to_string(idx) +
                                      " points outside the cloud");
    }
}

GridLookup grid_project_nearest(const RangeScan& scan, const Vec3& query) {
    if (!scan.has_grid() || !scan.intrinsics)
        throw InvalidArgument("grid_project_nearest requires a gridded scan");
    if (query.z() <= 0.0)
        return {GridLookupStatus::BehindCamera, -1, 0.0};

    const PinholeIntrinsics& K = *scan.intrinsics;
    const double uf = K.fx * query.x() / query.z() + K.cx;
    const double vf = K.fy * query.y() / query.z() + K.cy;
    const long u = std::lround(uf);
    const long v = std::lround(vf);
    if (u < 0 || u >= scan.width || v < 0 || v >= scan.height)
        return {GridLookupStatus::NoValidPixel, -1, 0.0};

    const int32_t direct = scan.at(static_cast<int>(u), static_cast<int>(v));
    if (direct >= 0)
        return {GridLookupStatus::Found, direct, (scan.points[direct] - query).norm()};

    // hole pixel: take the nearest valid candidate from the 3x3 neighborhood
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (long dv = -1; dv <= 1; ++dv) {
        for (long du = -1; du <= 1; ++du) {
            const long uu = u + du, vv = v + dv;
            if (uu < 0 || uu >= scan.width || vv < 0 || vv >= scan.height)
                continue;
            const int32_t idx = scan.at(static_cast<int>(uu), static_cast<int>(vv));
            if (idx < 0)
                continue;
            const double d2 = (scan.points[idx] - query).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                best_d2 = d2;
                best = idx;
            }
        }
    }
    if (best < 0)
        return {GridLookupStatus::NoValidPixel, -1, 0.0};
    return {GridLookupStatus::Found, best, std::sqrt(best_d2)};
}

TriangleMesh mesh_from_grid(const RangeScan& scan) {
    if (!scan.has_grid())
        throw InvalidArgument("mesh_from_grid requires a gridded scan");
    TriangleMesh mesh;
    mesh.vertices = scan.points;

    auto area_ok = [&](int a, int b, int c) {
        const Vec3 cr = (mesh.vertices[b] - mesh.vertices[a])
                            .cross(mesh.vertices[c] - mesh.vertices[a]);
        return 0.5 * cr.norm() >= 1e-12;
    };
    auto push = [&](int a, int b, int c) {
        if (area_ok(a, b, c))
            mesh.faces.push_back({a, b, c});
    };

    // winding chosen so normals point toward the sensor (-z in camera frame,
    // with image y running downward)
    for (int v = 0; v + 1 < scan.height; ++v) {
        for (int u = 0; u + 1 < scan.width; ++u) {
            const int32_t p00 = scan.at(u, v), p10 = scan.at(u + 1, v);
            const int32_t p01 = scan.at(u, v + 1), p11 = scan.at(u + 1, v + 1);
            const int valid = (p00 >= 0) + (p10 >= 0) + (p01 >= 0) + (p11 >= 0);
            if (valid == 4) {
                push(p00, p01, p11);
                push(p00, p11, p10);
            } else if (valid == 3) {
                if (p00 < 0) push(p10, p01, p11);
                else if (p10 < 0) push(p00, p01, p11);
                else if (p01 < 0) push(p00, p11, p10);
                else push(p00, p01, p10);
            }
        }
    }
    return mesh;
}

std::vector<Vec3> estimate_scan_normals(const RangeScan& scan) {
    TriangleMesh mesh = mesh_from_grid(scan);
    if (mesh.faces.empty())
        throw InvalidArgument("scan grid has no connected valid pixels");
    VertexFaceAdjacency adj = build_vertex_face_adjacency(mesh);
    return vertex_normals(mesh, adj);
}

} // namespace maskfit
