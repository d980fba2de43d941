#pragma once

#include "maskfit/core.hpp"

namespace maskfit {

/// Indexed triangle surface. Vertex normals are computed on demand and
/// cached; they are area-weighted averages of incident face normals.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> normals;   // unit length, zero for isolated vertices
    std::vector<int> isolated;   // vertices with no incident face

    bool has_normals() const { return normals.size() == vertices.size(); }
};

/// Checks the structural invariants: every face index in range, no face
/// repeating a vertex. Throws InvalidArgument on violation.
void validate_mesh(const TriangleMesh& mesh);

struct NormalReport {
    std::vector<int> isolated;
};

/// Computes per-vertex area-weighted normals and caches them on the mesh.
/// Throws ZeroAreaFace if any face has area < 1e-12 mm^2. Isolated vertices
/// get a zero normal and are listed in the report.
NormalReport compute_vertex_normals(TriangleMesh& mesh);

/// Parallel kernel behind compute_vertex_normals. `face_adjacency` must come
/// from build_vertex_face_adjacency on the same mesh.
struct VertexFaceAdjacency {
    std::vector<int> offsets; // size n+1
    std::vector<int> faces;   // incident face ids, grouped per vertex
};
VertexFaceAdjacency build_vertex_face_adjacency(const TriangleMesh& mesh);

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh,
                                 const VertexFaceAdjacency& adj);

namespace serial {
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh,
                                 const VertexFaceAdjacency& adj);
} // namespace serial

/// Applies a similarity map p -> scale*R*p + t to every vertex in place and
/// invalidates cached normals.
void transform_mesh(TriangleMesh& mesh, double scale, const Mat3& R, const Vec3& t);

} // namespace maskfit
