#include "maskfit/mesh.hpp"
#include "maskfit/errors.hpp"

#include <string>

namespace maskfit {

void validate_mesh(const TriangleMesh& mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (face[k] < 0 || face[k] >= n)
                throw InvalidArgument("face " + std::to_string(f) +
                                      " references vertex " + std::to_string(face[k]) +
                                      " outside [0," + std::to_string(n) + ")");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw InvalidArgument("face " + std::to_string(f) +
                                  " repeats a vertex index");
    }
}

VertexFaceAdjacency build_vertex_face_adjacency(const TriangleMesh& mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    VertexFaceAdjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (const Face& f : mesh.faces)
        for (int k = 0; k < 3; ++k)
            ++adj.offsets[f[k] + 1];
    for (int i = 0; i < n; ++i)
        adj.offsets[i + 1] += adj.offsets[i];
    adj.faces.resize(mesh.faces.size() * 3);
    std::vector<int> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi)
        for (int k = 0; k < 3; ++k)
            adj.faces[cursor[mesh.faces[fi][k]]++] = fi;
    return adj;
}

namespace {

// Cross product of two face edges; its norm is twice the face area and its
// direction the face normal, so summing it per vertex gives the
// area-weighted normal before normalization.
inline Vec3 face_cross(const TriangleMesh& mesh, int fi) {
    const Face& f = mesh.faces[fi];
    const Vec3& a = mesh.vertices[f[0]];
    return (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
}

inline Vec3 accumulate_vertex_normal(const TriangleMesh& mesh,
                                     const VertexFaceAdjacency& adj,
                                     std::span<const Vec3> crosses, int v) {
    Vec3 sum = Vec3::Zero();
    for (int k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k)
        sum += crosses[adj.faces[k]];
    const double len = sum.norm();
    if (len > 0.0)
        sum /= len;
    return sum;
}

std::vector<Vec3> face_crosses_checked(const TriangleMesh& mesh) {
    std::vector<Vec3> crosses(mesh.faces.size());
    int bad = -1;
#pragma omp parallel for
    for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi) {
        crosses[fi] = face_cross(mesh, fi);
        if (0.5 * crosses[fi].norm() < 1e-12) {
#pragma omp critical
            bad = (bad < 0) ? fi : std::min(bad, fi);
        }
    }
    if (bad >= 0)
        throw ZeroAreaFace("face " + std::to_string(bad) + " has area < 1e-12 mm^2");
    return crosses;
}

} // namespace

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh,
                                 const VertexFaceAdjacency& adj) {
    std::vector<Vec3> crosses = face_crosses_checked(mesh);
    std::vector<Vec3> normals(mesh.vertices.size());
#pragma omp parallel for
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
        normals[v] = accumulate_vertex_normal(mesh, adj, crosses, v);
    return normals;
}

namespace serial {
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh,
                                 const VertexFaceAdjacency& adj) {
    std::vector<Vec3> crosses(mesh.faces.size());
    for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi) {
        crosses[fi] = face_cross(mesh, fi);
        if (0.5 * crosses[fi].norm() < 1e-12)
            throw ZeroAreaFace("face " + std::to_string(fi) + " has area < 1e-12 mm^2");
    }
    std::vector<Vec3> normals(mesh.vertices.size());
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
        normals[v] = accumulate_vertex_normal(mesh, adj, crosses, v);
    return normals;
}
} // namespace serial

NormalReport compute_vertex_normals(TriangleMesh& mesh) {
    if (mesh.faces.empty())
        throw InvalidArgument("mesh has no faces");
    validate_mesh(mesh);
    VertexFaceAdjacency adj = build_vertex_face_adjacency(mesh);
    mesh.normals = vertex_normals(mesh, adj);
    NormalReport report;
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
        if (adj.offsets[v] == adj.offsets[v + 1])
            report.isolated.push_back(v);
    mesh.isolated = report.isolated;
    return report;
}

void transform_mesh(TriangleMesh& mesh, double scale, const Mat3& R, const Vec3& t) {
#pragma omp parallel for
    for (int i = 0; i < static_cast<int>(mesh.vertices.size()); ++i)
        mesh.vertices[i] = scale * (R * mesh.vertices[i]) + t;
    mesh.normals.clear();
    mesh.isolated.clear();
}

} // namespace maskfit
